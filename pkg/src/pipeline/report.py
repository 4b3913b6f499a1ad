"""报告文件读写：CSV（每个 λ 一行）与 JSON（完整曲线 + 元数据）

浮点数在 CSV 中以 17 位有效数字写出，JSON 使用 Python 的最短可往返表示，
两者读回后数值完全一致。NaN 在 CSV 中写为空，在 JSON 中写为 null。
"""
import datetime
import json
import logging
import math
import os
import threading
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from ..spectral.spectrum import DiscreteSpectrum

logger = logging.getLogger("RieszBounds.Report")

report_lock = threading.Lock()

FLOAT_FORMAT = "%.17g"
REPORT_COLUMNS = (
    "riesz_empirical",
    "upper_bound",
    "lower_leading",
    "lower_second",
    "counting_empirical",
    "counting_bound",
    "second_term_ratio",
)


@dataclass
class BoundCurve:
    """λ 网格上的经验 Riesz 均值与各个界"""
    lam: np.ndarray
    columns: Dict[str, np.ndarray]
    metadata: Dict[str, object] = field(default_factory=dict)
    dominance: Dict[str, object] = field(default_factory=dict)

    def to_frame(self) -> pd.DataFrame:
        data = {"lambda": np.asarray(self.lam, dtype=float)}
        for name in REPORT_COLUMNS:
            values = self.columns.get(name)
            data[name] = np.full(len(self.lam), np.nan) if values is None else np.asarray(values)
        return pd.DataFrame(data)

    @property
    def dominance_ok(self) -> bool:
        return all(v for k, v in self.dominance.items() if k.endswith("_ok"))


def to_jsonable(value):
    """numpy 标量/数组转为 JSON 可写对象，NaN/inf 转为 None"""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def _frame_payload(frame: pd.DataFrame) -> Dict[str, list]:
    return {name: to_jsonable(frame[name].to_numpy()) for name in frame.columns}


def write_table(frame: pd.DataFrame, output_dir: str, stem: str,
                metadata: Optional[Dict[str, object]] = None) -> Tuple[str, str]:
    """写出 <stem>.csv 与 <stem>.json"""
    csv_path = os.path.join(output_dir, f"{stem}.csv")
    json_path = os.path.join(output_dir, f"{stem}.json")
    document = {
        "metadata": to_jsonable(metadata or {}),
        "timestamp": datetime.datetime.now().isoformat(),
        "columns": list(frame.columns),
        "data": _frame_payload(frame),
    }
    with report_lock:
        os.makedirs(output_dir, exist_ok=True)
        frame.to_csv(csv_path, index=False, float_format=FLOAT_FORMAT, na_rep="")
        with open(json_path, 'w', encoding='utf-8') as f:
            f.write(json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False))
    logger.info(f"已写出 {csv_path}")
    return csv_path, json_path


def write_report(curve: BoundCurve, output_dir: str) -> Tuple[str, str]:
    """report.csv 与 report.json"""
    frame = curve.to_frame()
    metadata = dict(curve.metadata)
    metadata["dominance"] = curve.dominance
    return write_table(frame, output_dir, "report", metadata)


def spectrum_frame(spec: DiscreteSpectrum) -> pd.DataFrame:
    return pd.DataFrame({
        "k": np.arange(1, spec.eigenvalues.size + 1),
        "lambda_k": spec.eigenvalues,
        "null": spec.null_mask.astype(int),
    })


def write_spectrum(spec: DiscreteSpectrum, output_dir: str,
                   metadata: Optional[Dict[str, object]] = None) -> Tuple[str, str]:
    """spectrum.csv (k, lambda_k) 与带网格/核元数据的 spectrum.json"""
    info = dict(metadata or {})
    info.update(spec.metadata())
    return write_table(spectrum_frame(spec), output_dir, "spectrum", info)


def read_json(path: str) -> Dict[str, object]:
    """读回 JSON 报告，data 中的列转为 numpy 数组（null → NaN）"""
    with open(path, 'r', encoding='utf-8') as f:
        document = json.load(f)
    data = {}
    for name, values in document.get("data", {}).items():
        data[name] = np.array([np.nan if v is None else v for v in values])
    document["data"] = data
    return document


def read_csv(path: str) -> pd.DataFrame:
    return pd.read_csv(path, float_precision="round_trip")


def strip_timestamp(path: str) -> str:
    """去掉 timestamp 字段后的 JSON 文本（用于比较两次运行）"""
    with open(path, 'r', encoding='utf-8') as f:
        document = json.load(f)
    document.pop("timestamp", None)
    return json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False)


def summary_lines(results: List[Dict[str, object]]) -> List[str]:
    lines = []
    for item in results:
        status = "OK" if item.get("dominance_ok", True) else "VIOLATION"
        lines.append(f"[{item.get('config_name')}] {status} -> {item.get('output_dir')}")
    return lines
