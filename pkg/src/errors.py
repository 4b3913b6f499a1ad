class NumericalError(Exception):
    """数值计算失败（求积不收敛、求根失败、外推不收敛等）

    命令行据此返回退出码 3；各模块的异常类都从这里派生。
    """
    pass
