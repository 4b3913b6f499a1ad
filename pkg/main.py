#!/usr/bin/env python3
import argparse
import concurrent.futures
import logging
import os
import sys

from src.config.loader import ConfigError, load_configs
from src.errors import NumericalError
from src.pipeline.core import run_experiment
from src.pipeline.report import summary_lines
from src.utils.logger import setup_logger

logger = logging.getLogger("RieszBounds")

SUBCOMMANDS = ("spectrum", "bounds", "lemma", "eta", "dirichlet", "run")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_DOMINANCE = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description='积分算子特征值 Riesz 均值的上下界数值验证',
        epilog='默认值见 config.ini 与 experiment_configs/demo.ini；'
               '退出码: 0 成功, 2 配置错误, 3 数值失败, 4 占优检查失败 (--assert-bounds)')
    parser.add_argument('command', choices=SUBCOMMANDS,
                        help='spectrum: 离散谱; bounds: 界曲线; lemma: 一维辅助积分表; '
                             'eta: 重叠函数表; dirichlet: 长方体 Dirichlet 计数; run: 配置中的全部任务')
    parser.add_argument('--config', type=str, default=None,
                        help='实验配置文件路径，或 experiment_configs 下的 glob/逗号分隔列表 (默认 *.ini)')
    parser.add_argument('--out', type=str, default=None,
                        help='输出根目录（每个实验写入 <out>/<配置名>）')
    parser.add_argument('--seed', type=int, default=None, help='Monte-Carlo 随机种子')
    parser.add_argument('--assert-bounds', action='store_true',
                        help='任一占优检查失败时以退出码 4 结束')
    parser.add_argument('--lambda-points', type=int, default=None, help='λ 网格点数')
    parser.add_argument('--mesh-cells', type=int, default=None, help='目标单元数')
    parser.add_argument('--debug', action='store_true', help='调试日志')
    return parser


def process_config(cfg, command: str):
    tasks = cfg.tasks if command == 'run' else (command,)
    return run_experiment(cfg, tasks)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    # 初始化日志
    setup_logger(level=logging.DEBUG if args.debug else logging.INFO)

    try:
        configs = load_configs(args.config)
    except ConfigError as e:
        logger.error(f"配置错误: {str(e)}")
        return EXIT_CONFIG
    if not configs:
        logger.error("没有启用的实验配置，退出")
        return EXIT_CONFIG

    configs = [cfg.with_overrides(
        seed=args.seed, mesh_cells=args.mesh_cells, lambda_points=args.lambda_points,
        output_dir=os.path.abspath(os.path.join(args.out, cfg.config_name)) if args.out else None)
        for cfg in configs]

    exit_code = EXIT_OK
    results = []
    # 使用线程池并行处理配置
    with concurrent.futures.ThreadPoolExecutor(max_workers=min(4, len(configs))) as executor:
        futures = {executor.submit(process_config, cfg, args.command): cfg for cfg in configs}

        for future in concurrent.futures.as_completed(futures):
            cfg = futures[future]
            try:
                result = future.result()
                results.append(result)
                logger.info(f"[{cfg.config_name}] 任务完成")
                if args.assert_bounds and not result.get("dominance_ok", True):
                    logger.error(f"[{cfg.config_name}] 占优检查失败")
                    exit_code = max(exit_code, EXIT_DOMINANCE)
            except ConfigError as e:
                logger.error(f"[{cfg.config_name}] 配置错误: {str(e)}")
                exit_code = max(exit_code, EXIT_CONFIG)
            except NumericalError as e:
                logger.error(f"[{cfg.config_name}] 数值计算失败: {str(e)}", exc_info=args.debug)
                exit_code = max(exit_code, EXIT_NUMERICAL)
            except Exception as e:
                logger.error(f"[{cfg.config_name}] 任务执行出错: {str(e)}", exc_info=True)
                exit_code = max(exit_code, EXIT_FAILURE)

    for line in summary_lines(sorted(results, key=lambda r: r["config_name"])):
        logger.info(line)
    logger.info("所有配置处理完成")
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
