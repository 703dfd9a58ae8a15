"""
ingestion/csv_parser.py
功能：宽表 CSV <-> Dataset。第一列表头必须是 time，其余列为序列名，单元格全部为数值。
"""
import io
import logging

import numpy as np
import pandas as pd

from core.exceptions import InputError
from core.schema import Dataset, TimeGrid, TimeSeries
from utils.file_manager import FileManager, float_text

logger = logging.getLogger(__name__)

TIME_COLUMN = "time"


def parse_dataset(text: str) -> Dataset:
    """解析 CSV 文本 (UTF-8, \\n 或 \\r\\n 换行)"""
    text = text.lstrip("\ufeff").replace("\r\n", "\n")
    try:
        # 1. 全部按文本读入，数值转换单独做，便于定位坏单元格
        df = pd.read_csv(io.StringIO(text), header=None, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        raise InputError("CSV 为空")
    except pd.errors.ParserError as e:
        raise InputError(f"CSV 行列数不一致: {e}")

    header = [str(c).strip() for c in df.iloc[0].tolist()]
    if header[0] != TIME_COLUMN:
        raise InputError(f"第一列表头必须是 '{TIME_COLUMN}'，实际为 '{header[0]}'")
    names = header[1:]
    if not names:
        raise InputError("CSV 中没有任何序列列")
    dup = sorted({n for n in names if names.count(n) > 1})
    if dup:
        raise InputError(f"序列名重复: {dup}")
    if "" in names:
        raise InputError("存在空的序列名")

    body = df.iloc[1:]
    if len(body) < 2:
        raise InputError(f"至少需要 2 行数据，当前 {len(body)} 行")

    # 2. 数值转换 (errors='coerce' 把非数字变 NaN)
    numeric = body.apply(lambda col: pd.to_numeric(col.str.strip(), errors="coerce"))
    values = numeric.to_numpy(dtype=float)
    bad = ~np.isfinite(values)
    if bad.any():
        row, col = np.argwhere(bad)[0]
        raise InputError(f"第 {row + 2} 行 '{header[col]}' 列的单元格缺失或不是数值")

    grid = TimeGrid(tuple(float(t) for t in values[:, 0]))
    series = tuple(
        TimeSeries(name, tuple(float(h) for h in values[:, k + 1]), grid.points)
        for k, name in enumerate(names)
    )
    logger.debug(f"📊 解析完成: {len(series)} 条序列 x {len(grid)} 个时间点")
    return Dataset(grid, series)


def serialize_dataset(ds: Dataset) -> str:
    """Dataset -> CSV 文本；浮点按最短可回读表示输出"""
    for ts in ds.series:
        if ts.times != ds.grid.points:
            raise InputError(f"序列 '{ts.name}' 已去平台，网格视图与数据集网格不同，无法写成宽表")
    columns = {TIME_COLUMN: list(ds.grid.points)}
    for ts in ds.series:
        columns[ts.name] = list(ts.heights)
    frame = pd.DataFrame(columns, columns=[TIME_COLUMN] + ds.names)
    return frame.to_csv(index=False, lineterminator="\n", float_format=float_text)


def load_dataset(path: str) -> Dataset:
    try:
        text = FileManager.read_text(path)
    except OSError as e:
        raise InputError(f"无法读取 {path}: {e}")
    except UnicodeDecodeError as e:
        raise InputError(f"{path} 不是 UTF-8 编码的文本: {e}")
    return parse_dataset(text)


def save_dataset(ds: Dataset, path: str) -> str:
    return FileManager.write_text(path, serialize_dataset(ds))
