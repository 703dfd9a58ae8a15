"""
eedag.py
功能：命令行入口。
  python eedag.py build <in.csv> [--json out.json] [--dot out.dot] [--normalize lo,hi]
  python eedag.py distance <a.csv> <b.csv> [--report out.json] [--cap N] [--seed S] [--swap A,B] [--series X,Y,...]
  python eedag.py slice <dag.json> --epsilon E [--mode comparable|verbatim] --dot out.dot
  python eedag.py persistence <in.csv> --series NAME [--csv out.csv]
  python eedag.py baseline <a.csv> <b.csv> --samples N --seed S [--permute] [--shift] [--subset-size K] [--report out.json]
  python eedag.py synth --kind sine|cosine --points N --noise A --seed S --out out.csv
退出码：0 成功，1 输入错误，2 内部不变量被破坏。
"""
import argparse
import logging
import sys
from typing import List, Optional, Sequence, Tuple

from alignment.matrix import DIAGONAL_FIRST
from core.config import SLICE_MODES, TIE_POLICIES, RunConfig, Settings
from core.exceptions import EEDagError, InputError
from distance.dag_distance import DagDistanceService, distance_report_json
from etl.exporter import DOT, JSON, export, import_dag
from etl.graph_engine import build_dag, epsilon_slice
from evaluation.baseline import baseline, subset, subset_baseline, swap_names
from ingestion.csv_parser import load_dataset, save_dataset, serialize_dataset
from ingestion.processors import collapse_plateaus, normalize_amplitude
from ingestion.synthetic import KINDS, SyntheticSpec, generate_synthetic
from persistence.diagram import SUBLEVEL, SUPERLEVEL, export_diagram_csv, persistence_diagram
from utils.file_manager import FileManager, dumps_json
from utils.logger import setup_logging

logger = logging.getLogger("eedag")


def _emit(text: str, path: Optional[str]):
    """有输出路径写文件，否则打印到 stdout"""
    if path:
        FileManager.write_text(path, text)
        logger.info(f"✅ 已写出 {path}")
    else:
        sys.stdout.write(text)


def _parse_range(raw: str) -> Tuple[float, float]:
    try:
        lo, hi = (float(v) for v in raw.split(","))
    except ValueError:
        raise InputError(f"--normalize 需要 lo,hi 形式，实际为 {raw!r}")
    return lo, hi


# --- 子命令处理 ---
def _handle_build(args, settings: Settings) -> int:
    ds = load_dataset(args.input_csv)
    if args.normalize:
        ds = normalize_amplitude(ds, *_parse_range(args.normalize))
    dag = build_dag(ds, max_workers=settings.max_workers)
    if args.json:
        _emit(export(dag, JSON), args.json)
    if args.dot:
        _emit(export(dag, DOT), args.dot)
    if not args.json and not args.dot:
        _emit(export(dag, JSON), None)
    return 0


def _parse_names(raw: str, option: str) -> List[str]:
    names = [n.strip() for n in raw.split(",") if n.strip()]
    if not names:
        raise InputError(f"{option} 需要逗号分隔的序列名，实际为 {raw!r}")
    return names


def _handle_distance(args, settings: Settings) -> int:
    ds_a, ds_b = load_dataset(args.a_csv), load_dataset(args.b_csv)
    # 先在完整数据集上交换标签，再取子集
    if args.swap:
        pair = _parse_names(args.swap, "--swap")
        if len(pair) != 2:
            raise InputError(f"--swap 需要恰好两个序列名，实际为 {pair}")
        ds_b = swap_names(ds_b, *pair)
        logger.info(f"🔀 已交换第二个数据集中 {pair[0]} 与 {pair[1]} 的标签")
    if args.series:
        names = _parse_names(args.series, "--series")
        ds_a, ds_b = subset(ds_a, names), subset(ds_b, names)
    service = DagDistanceService(args.cap or settings.pair_cap, args.total_cap or settings.total_cap,
                                 max_workers=settings.max_workers, tie_policy=args.tie_policy)
    report = service.compare(ds_a, ds_b)
    _emit(distance_report_json(report), args.report)
    return 0


def _handle_slice(args, settings: Settings) -> int:
    dag = import_dag(FileManager.read_text(args.dag_json))
    sliced = epsilon_slice(dag, args.epsilon, args.mode or settings.slice_mode)
    logger.info(f"🕸️ 切片保留 {len(sliced.vertices)} 节点, {len(sliced.edges)} 边")
    _emit(export(sliced, DOT), args.dot)
    if args.json:
        _emit(export(sliced, JSON), args.json)
    return 0


def _handle_persistence(args, settings: Settings) -> int:
    ds = load_dataset(args.input_csv)
    ts, _ = collapse_plateaus(ds.get(args.series))
    _emit(export_diagram_csv(persistence_diagram(ts, args.which)), args.csv)
    return 0


def _handle_baseline(args, settings: Settings) -> int:
    ds_a, ds_b = load_dataset(args.a_csv), load_dataset(args.b_csv)
    # 两个开关都不给时同时打乱名字与平移
    permute, shift = args.permute, args.shift
    if not permute and not shift:
        permute = shift = True
    config = RunConfig.from_settings(settings, seed=args.seed, samples=args.samples, pair_cap=args.cap,
                                     permute=permute, shift=shift, tie_policy=args.tie_policy,
                                     subset_size=args.subset_size)
    if config.subset_size is not None:
        result = subset_baseline(ds_a, ds_b, config)
    else:
        result = baseline(ds_a, ds_b, config)
    _emit(dumps_json(result.to_dict()), args.report)
    return 0


def _handle_synth(args, settings: Settings) -> int:
    spec = SyntheticSpec(kind=args.kind, amplitude=args.amplitude, phase=args.phase,
                         noise_amplitude=args.noise, n_points=args.points,
                         n_noise_bumps=args.bumps, name=args.series or "")
    ds = generate_synthetic(spec, args.seed)
    if args.out:
        save_dataset(ds, args.out)
        logger.info(f"✅ 已写出 {args.out}")
    else:
        sys.stdout.write(serialize_dataset(ds))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eedag", description="极值事件 DAG 构建与比较工具")
    parser.add_argument("--log-level", default=None, help="日志级别 (默认取 EEDAG_LOG_LEVEL)")
    subparsers = parser.add_subparsers(dest="command", metavar="command")

    p = subparsers.add_parser("build", help="由 CSV 构建极值事件 DAG")
    p.add_argument("input_csv")
    p.add_argument("--json")
    p.add_argument("--dot")
    p.add_argument("--normalize", help="lo,hi 幅值归一化区间")
    p.set_defaults(handler=_handle_build)

    p = subparsers.add_parser("distance", help="计算两个数据集的 d_ED")
    p.add_argument("a_csv")
    p.add_argument("b_csv")
    p.add_argument("--report")
    p.add_argument("--cap", type=int, help="每对骨架的最优对齐枚举上限")
    p.add_argument("--total-cap", type=int, help="对齐组合总数上限")
    p.add_argument("--seed", type=int, help="仅记录，d_ED 本身是确定性的")
    p.add_argument("--series", help="只比较这些序列 (逗号分隔)")
    p.add_argument("--swap", help="A,B: 比较前交换第二个数据集中两条序列的标签")
    p.add_argument("--tie-policy", choices=TIE_POLICIES, default=DIAGONAL_FIRST)
    p.set_defaults(handler=_handle_distance)

    p = subparsers.add_parser("slice", help="ε-DAG 切片")
    p.add_argument("dag_json")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--mode", choices=SLICE_MODES)
    p.add_argument("--dot", required=True)
    p.add_argument("--json")
    p.set_defaults(handler=_handle_slice)

    p = subparsers.add_parser("persistence", help="导出单条序列的持久图")
    p.add_argument("input_csv")
    p.add_argument("--series", required=True)
    p.add_argument("--which", choices=(SUBLEVEL, SUPERLEVEL), default=SUBLEVEL)
    p.add_argument("--csv")
    p.set_defaults(handler=_handle_persistence)

    p = subparsers.add_parser("baseline", help="打乱名字 / 循环平移的零假设基线")
    p.add_argument("a_csv")
    p.add_argument("b_csv")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--permute", action="store_true")
    p.add_argument("--shift", action="store_true")
    p.add_argument("--cap", type=int)
    p.add_argument("--subset-size", type=int, help="每个样本随机抽 k 条序列做成对基线")
    p.add_argument("--tie-policy", choices=TIE_POLICIES, default=DIAGONAL_FIRST)
    p.add_argument("--report")
    p.set_defaults(handler=_handle_baseline)

    p = subparsers.add_parser("synth", help="生成合成正弦/余弦数据")
    p.add_argument("--kind", choices=KINDS, default="sine")
    p.add_argument("--points", type=int, default=1001)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--bumps", type=int, default=0, help="局部噪声凸起个数；为 0 时 --noise 按逐点均匀噪声加入")
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--phase", type=float, default=0.0)
    p.add_argument("--series")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(handler=_handle_synth)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "handler", None) is None:
        parser.print_help()
        return 0
    try:
        settings = Settings.from_env()
        setup_logging(args.log_level or settings.log_level)
        return args.handler(args, settings)
    except EEDagError as e:
        logger.error(f"❌ {e}")
        return e.exit_code
    except UnicodeDecodeError as e:
        logger.error(f"❌ 输入文件不是 UTF-8 文本: {e}")
        return 1
    except OSError as e:
        logger.error(f"❌ 文件读写失败: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
