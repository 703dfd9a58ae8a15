"""
utils/file_manager.py
功能：输出目录管理。负责读写 CSV / JSON / DOT 产物，并在 artifact_registry.json 中登记每次产出。
"""
import json
import os
from typing import Any, Dict, Optional


class FileManager:
    """
    产物统一写到 base_dir 下；registry 记录 {源文件: {产物类型: 路径}}，便于批处理后回溯。
    """

    def __init__(self, base_dir: str = "outputs"):
        self.base_dir = base_dir
        self.registry_path = os.path.join(self.base_dir, "artifact_registry.json")
        os.makedirs(self.base_dir, exist_ok=True)

    # --- 私有辅助方法 ---
    def _load_registry(self) -> Dict:
        """注册表不存在或损坏时返回空字典"""
        if not os.path.exists(self.registry_path):
            return {}
        try:
            with open(self.registry_path, 'r', encoding='utf-8') as f:
                return json.load(f)
        except (json.JSONDecodeError, IOError):
            return {}

    def _save_registry(self, data: Dict):
        with open(self.registry_path, 'w', encoding='utf-8') as f:
            json.dump(data, f, ensure_ascii=False, indent=2, sort_keys=True)

    # --- 核心功能方法 ---
    def path_for(self, filename: str) -> str:
        return os.path.join(self.base_dir, filename)

    def register_artifact(self, source: str, kind: str, path: str):
        registry = self._load_registry()
        registry.setdefault(source, {})[kind] = path
        self._save_registry(registry)

    def get_artifacts(self, source: str) -> Dict[str, str]:
        return self._load_registry().get(source, {})

    @staticmethod
    def read_text(path: str) -> str:
        with open(path, 'r', encoding='utf-8') as f:
            return f.read()

    @staticmethod
    def write_text(path: str, text: str) -> str:
        parent = os.path.dirname(path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        with open(path, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
        return path

    @staticmethod
    def read_json(path: str) -> Any:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)

    @classmethod
    def write_json(cls, path: str, data: Any, indent: Optional[int] = 2) -> str:
        return cls.write_text(path, dumps_json(data, indent=indent))


def dumps_json(data: Any, indent: Optional[int] = 2) -> str:
    """确定性 JSON：键排序，保留中文，浮点按 repr 输出 (可无损回读)"""
    return json.dumps(data, ensure_ascii=False, indent=indent, sort_keys=True) + "\n"


def float_text(value: float) -> str:
    """最短可无损回读的浮点文本 (CSV 输出用)"""
    return repr(float(value))
