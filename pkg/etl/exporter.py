"""
etl/exporter.py
功能：DAG 的 JSON (无损、可回读) 与 Graphviz DOT 文本导出。
顶点编号约定为 (series_index, ordinal)，ordinal 从 1 开始。
"""
import json
from typing import Any, Dict

from core.exceptions import InputError
from core.schema import DagEdge, DagVertex, ExtremalEventDAG
from utils.file_manager import dumps_json

JSON = "json"
DOT = "dot"


def dag_to_dict(dag: ExtremalEventDAG) -> Dict[str, Any]:
    return {
        "grid_name": dag.grid_name,
        "series": list(dag.series_names),
        "vertices": [
            {"series": v.series_index, "ordinal": v.ordinal, "label": v.label,
             "time": v.time, "weight": v.weight, "height": v.height}
            for v in dag.vertices
        ],
        "edges": [
            {"src": list(e.src), "dst": list(e.dst), "weight": e.weight}
            for e in dag.edges
        ],
    }


def _fmt(w: float) -> str:
    return format(w, ".6g")


def dag_to_dot(dag: ExtremalEventDAG, name: str = "eedag") -> str:
    lines = []
    for v in dag.vertices:
        series = dag.series_names[v.series_index]
        lines.append(f'  "{v.series_index}:{v.ordinal}" [label="{series}:{v.label}@{v.ordinal} (w={_fmt(v.weight)})"];')
    for e in dag.edges:
        lines.append(f'  "{e.src[0]}:{e.src[1]}" -> "{e.dst[0]}:{e.dst[1]}" [label="{_fmt(e.weight)}"];')
    return 'digraph "%s" {\n  rankdir=LR;\n%s\n}\n' % (name, "\n".join(lines))


def export(dag: ExtremalEventDAG, fmt: str = JSON) -> str:
    if fmt == JSON:
        return dumps_json(dag_to_dict(dag))
    if fmt == DOT:
        return dag_to_dot(dag)
    raise InputError(f"未知导出格式: {fmt}")


def import_dag(text: str) -> ExtremalEventDAG:
    try:
        data = json.loads(text)
        vertices = tuple(
            DagVertex(int(v["series"]), int(v["ordinal"]), v["label"], float(v["time"]),
                      float(v["weight"]), float(v.get("height", 0.0)))
            for v in data["vertices"]
        )
        edges = tuple(
            DagEdge(tuple(e["src"]), tuple(e["dst"]), float(e["weight"]))
            for e in data["edges"]
        )
        return ExtremalEventDAG(tuple(data["series"]), vertices, edges, data.get("grid_name"))
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise InputError(f"DAG JSON 格式错误: {e}")
