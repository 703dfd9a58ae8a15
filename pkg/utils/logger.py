"""
utils/logger.py
功能：日志初始化。库模块只 getLogger，由入口脚本调用一次 setup_logging。
"""
import logging

LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'


def setup_logging(level: str = "INFO") -> None:
    logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO), format=LOG_FORMAT, force=True)
