"""
check_etl_health.py
DAG 流水线健康检查脚本 (自动化测试)
功能：
1. 生成模拟时间序列文件 (.csv)
2. 运行 DAGPipeline
3. 验证 JSON / DOT 产物与产物登记表
4. 验证查重机制
"""

import os
import time
import shutil

from etl.exporter import DOT, JSON, import_dag
from etl.graph_engine import check_dag
from etl.pipeline import DAGPipeline
from ingestion.csv_parser import save_dataset
from ingestion.synthetic import phase_locked_specs, synthesize_collection
from utils.file_manager import FileManager
from utils.logger import setup_logging

# --- 配置 ---
TEST_DIR = "data"
OUTPUT_DIR = os.path.join(TEST_DIR, "health_outputs")
TEST_FILENAME = f"health_check_{int(time.time())}.csv"
TEST_FILE_PATH = os.path.join(TEST_DIR, TEST_FILENAME)


def create_mock_dataset():
    """生成 3 条相位错开、带噪声凸起的正弦序列"""
    specs = phase_locked_specs(n_series=3, noise_amplitude=0.03, n_noise_bumps=2)
    save_dataset(synthesize_collection(specs, seed=int(time.time()) % 10_000), TEST_FILE_PATH)
    print(f"🔨 [Setup] 已生成测试文件: {TEST_FILE_PATH}")


def check_artifacts(result):
    """验证 JSON / DOT 是否写出且可读回"""
    print("\n🔍 [Check 1] 正在检查产物文件...")
    files = FileManager(OUTPUT_DIR)
    artifacts = files.get_artifacts(TEST_FILENAME)
    json_path = artifacts.get(JSON)
    if not json_path or not os.path.exists(json_path):
        print(f"   ❌ 失败: 登记表中没有 '{TEST_FILENAME}' 的 JSON 产物！")
        return
    dag = import_dag(files.read_text(json_path))
    problems = check_dag(dag)
    if problems:
        print(f"   ❌ 失败: 读回的 DAG 结构异常: {problems[:3]}")
    elif len(dag.vertices) != result["vertices"]:
        print(f"   ❌ 失败: 节点数不一致 ({len(dag.vertices)} vs {result['vertices']})")
    else:
        print(f"   ✅ JSON 产物正常: {len(dag.vertices)} 节点, {len(dag.edges)} 边。")

    dot_path = artifacts.get(DOT, "")
    if os.path.exists(dot_path) and files.read_text(dot_path).startswith("digraph"):
        print(f"   ✅ DOT 产物正常: {dot_path}")
    else:
        print("   ❌ 失败: DOT 产物缺失或格式不对！")


def verify_deduplication(pipeline):
    """验证重复运行是否会被跳过"""
    print("\n🔍 [Check 2] 验证查重机制 (Deduplication)...")
    print("   >>> 尝试再次处理相同文件...")
    result = pipeline.process_file(TEST_FILE_PATH)
    if result["status"] == "skipped":
        print("   ✅ 第二次运行被跳过。")
    else:
        print(f"   ❌ 查重失败: 状态为 {result['status']} ({result['msg']})")


def main():
    setup_logging("INFO")
    print("=" * 50)
    print("DAG 流水线健康检查程序启动")
    print("=" * 50)

    # 1. 准备环境
    os.makedirs(TEST_DIR, exist_ok=True)
    create_mock_dataset()

    # 2. 初始化 Pipeline
    pipeline = DAGPipeline(output_dir=OUTPUT_DIR)
    print("✅ Pipeline 初始化成功。")

    # 3. 运行 Pipeline (首次)
    print("\n🚀 [Run] 开始第一次处理...")
    result = pipeline.process_file(TEST_FILE_PATH)
    if result["status"] == "error":
        print(f"❌ 处理失败: {result['msg']}")
        return
    print(f"   ℹ️ 状态: {result['status']} ({result['msg']})")

    # 4. 执行验证
    check_artifacts(result)
    verify_deduplication(pipeline)

    # 5. 清理
    os.remove(TEST_FILE_PATH)
    shutil.rmtree(OUTPUT_DIR, ignore_errors=True)

    print("\n" + "=" * 50)
    print("🎉 检查结束！如果以上均为 ✅，则 DAG 流水线运行正常。")
    print("=" * 50)


if __name__ == "__main__":
    main()
