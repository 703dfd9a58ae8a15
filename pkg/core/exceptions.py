"""
core/exceptions.py
功能：统一异常体系。每个异常类携带 CLI 退出码 (1=输入错误, 2=内部不变量被破坏)。
"""


class EEDagError(Exception):
    """所有业务异常的基类"""
    exit_code = 1


class InputError(EEDagError):
    """输入数据不合法：CSV 格式、时间轴、重复序列名、常数序列、参数越界等"""
    exit_code = 1


class InvariantViolation(EEDagError):
    """内部不变量被破坏 (理论上不可达，出现即为 bug)"""
    exit_code = 2
