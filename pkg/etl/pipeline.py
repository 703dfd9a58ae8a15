"""
etl/pipeline.py
DAG 流水线：CSV -> (归一化) -> 去平台 -> 极值事件 DAG -> JSON / DOT 产物。
"""

import hashlib
import logging
import os
from typing import Any, Dict, Optional, Tuple

from core.exceptions import EEDagError
from etl.exporter import DOT, JSON, export
from etl.graph_engine import ExtremalEventDAGEngine, check_dag
from ingestion.csv_parser import load_dataset
from ingestion.processors import collapse_dataset, normalize_amplitude
from utils.file_manager import FileManager

logger = logging.getLogger(__name__)


class DAGPipeline:
    def __init__(self, output_dir: str = "outputs", max_workers: int = 4,
                 normalize: Optional[Tuple[float, float]] = None):
        self.files = FileManager(output_dir)
        self.engine = ExtremalEventDAGEngine(max_workers=max_workers)
        self.normalize = normalize

    @staticmethod
    def fingerprint(file_path: str) -> str:
        """文件内容 MD5，用于跳过未变化的输入"""
        hasher = hashlib.md5()
        with open(file_path, 'rb') as f:
            while chunk := f.read(8192):
                hasher.update(chunk)
        return hasher.hexdigest()

    def _settings_tag(self) -> str:
        return f"normalize={self.normalize}"

    def process_file(self, file_path: str, force_update: bool = False) -> Dict[str, Any]:
        display_name = os.path.basename(file_path)
        stem = os.path.splitext(display_name)[0]
        result = {"file": display_name, "status": "pending", "vertices": 0, "edges": 0, "msg": ""}
        logger.info(f"🚀 [Pipeline] 启动: {display_name}")

        # --- Step 1: 查重 ---
        try:
            digest = self.fingerprint(file_path)
        except OSError as e:
            result["status"] = "error"
            result["msg"] = f"读取失败: {e}"
            return result
        known = self.files.get_artifacts(display_name)
        if (not force_update and known.get("fingerprint") == digest
                and known.get("settings") == self._settings_tag()
                and os.path.exists(known.get(JSON, ""))):
            result["status"] = "skipped"
            result["msg"] = "输入内容未变化"
            logger.info(f"⏭️ {display_name} 未变化，跳过。")
            return result

        # --- Step 2: 解析 & 预处理 ---
        try:
            ds = load_dataset(file_path)
            if self.normalize is not None:
                ds = normalize_amplitude(ds, *self.normalize)
            ds, warnings = collapse_dataset(ds)
        except EEDagError as e:
            result["status"] = "error"
            result["msg"] = f"解析失败: {e}"
            return result

        # --- Step 3: 构建 DAG ---
        try:
            dag = self.engine.build(ds, grid_name=stem)
        except EEDagError as e:
            result["status"] = "error"
            result["msg"] = f"构建失败: {e}"
            return result
        problems = check_dag(dag)
        if problems:
            result["status"] = "error"
            result["msg"] = "; ".join(problems[:5])
            return result

        # --- Step 4: 写出产物 ---
        json_path = self.files.write_text(self.files.path_for(f"{stem}.dag.json"), export(dag, JSON))
        dot_path = self.files.write_text(self.files.path_for(f"{stem}.dag.dot"), export(dag, DOT))
        self.files.register_artifact(display_name, JSON, json_path)
        self.files.register_artifact(display_name, DOT, dot_path)
        self.files.register_artifact(display_name, "fingerprint", digest)
        self.files.register_artifact(display_name, "settings", self._settings_tag())

        result["vertices"] = len(dag.vertices)
        result["edges"] = len(dag.edges)
        if warnings:
            result["status"] = "warning"
            result["msg"] = f"已合并 {len(warnings)} 段平台"
        else:
            result["status"] = "success"
            result["msg"] = "构建成功"
        logger.info(f"✅ [Success] {display_name}: {result['vertices']} 节点, {result['edges']} 边")
        return result
