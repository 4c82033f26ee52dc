#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
砖块铺砌计算工具 - 主程序
校验铺砌、判定路径等价、搜索可消性反例、收缩箭头并检查充分性，
计算 toric 环 S 与中心 R，以及闭点的几何报告
"""

import argparse
import logging
import sys
from typing import List, Optional, Sequence

from config import (
    DEFAULT_BUDGET, DEFAULT_LEN_BOUND, DEFAULT_MAX_LEN, DEFAULT_SEPARATION_LEN,
    EXIT_COMPUTED, EXIT_FALSIFIED, EXIT_INCONCLUSIVE, EXIT_INPUT_ERROR,
)
from contraction import (
    FAILED, INCONCLUSIVE, check_adequacy, check_two_cycle_removal, contract, pushforward_labeling,
    remove_two_cycles,
)
from geometry import K_PLUS_IDEAL, SubalgebraPresentation, geometry_report
from impression import verify_labeling
from report_generator import ReportGenerator
from rewrite_engine import (
    BUDGET_EXCEEDED, COUNTEREXAMPLE, EQUIVALENT, INEQUIVALENT, EquivClassQuery, center_candidate_u,
    cancellativity_search, check_unit_cycle_centrality, paths_equivalent, superpotential_relations,
)
from tiling_core import TilingError, TorusQuiver, make_path, validate_tiling
from tiling_parser import TilingFile, load
from toric_center import (
    DIFFER, EQUAL_TO_S, NOT_CENTRAL, central_elements, compare_S_Sprime, compute_R, vertex_monoids,
)

logger = logging.getLogger(__name__)

# 结果状态
COMPUTED = "computed"
FALSIFIED = "falsified"
UNDECIDED = "inconclusive"

STATUS_EXIT = {
    COMPUTED: EXIT_COMPUTED,
    FALSIFIED: EXIT_FALSIFIED,
    UNDECIDED: EXIT_INCONCLUSIVE,
}


def _summarize(verdicts) -> str:
    verdicts = set(verdicts)
    if INEQUIVALENT in verdicts:
        return "no"
    if BUDGET_EXCEEDED in verdicts:
        return BUDGET_EXCEEDED
    return "yes"


class TilingAnalysisSystem:
    """砖块铺砌分析系统：每个命令返回一个结果字典，出错时带 'error' 键"""

    def __init__(self, budget: int = DEFAULT_BUDGET):
        self.budget = budget
        self.report_generator = ReportGenerator()

    def load(self, path: str):
        """加载铺砌文件或环文件"""
        logger.info(f"加载输入文件: {path}")
        try:
            return {'source': path, 'file': load(path)}
        except (TilingError, OSError) as e:
            logger.error(f"❌ 加载失败: {e}")
            return {'source': path, 'name': path, 'error': str(e)}

    def _run(self, kind: str, name: str, compute):
        try:
            result = compute()
        except TilingError as e:
            logger.error(f"❌ {kind} 失败: {e}")
            return {'kind': kind, 'name': name, 'error': str(e), 'status': 'error'}
        result.setdefault('kind', kind)
        result.setdefault('name', name)
        return result

    @staticmethod
    def _require_valid(q: TorusQuiver):
        report = validate_tiling(q)
        if not report.ok:
            raise TilingError(f"铺砌校验失败: {', '.join(report.invariants())}")

    @staticmethod
    def _require_labeling(tf: TilingFile):
        lab = tf.labeling()
        if lab is None:
            raise TilingError("需要箭头标注：请给出 label 或声明 square")
        return lab

    def validate(self, tf: TilingFile):
        def compute():
            report = validate_tiling(tf.quiver)
            status = COMPUTED if report.ok else FALSIFIED
            return {'quiver': tf.quiver, 'report': report, 'status': status}
        return self._run("validation", tf.name, compute)

    def relations(self, tf: TilingFile):
        def compute():
            q = tf.quiver
            self._require_valid(q)
            rels = superpotential_relations(q)
            centrality = check_unit_cycle_centrality(q, rels, self.budget)
            central = _summarize(centrality.values())
            status = {"yes": COMPUTED, "no": FALSIFIED}.get(central, UNDECIDED)
            # 按顶点汇总：以该顶点为尾的箭头
            per_vertex = {v: _summarize(centrality[a.id] for a in q.out_arrows(v)) for v in q.vertices}
            return {'relations': rels, 'unit_cycles': center_candidate_u(q), 'centrality': per_vertex,
                    'unit_cycles_central': central, 'status': status}
        return self._run("relations", tf.name, compute)

    def equiv(self, tf: TilingFile, left: Sequence[str], right: Sequence[str]):
        def compute():
            q = tf.quiver
            self._require_valid(q)
            rels = superpotential_relations(q)
            query = EquivClassQuery(make_path(q, left), make_path(q, right), self.budget)
            verdict = paths_equivalent(q, rels, query)
            status = {EQUIVALENT: COMPUTED, INEQUIVALENT: FALSIFIED}.get(verdict, UNDECIDED)
            return {'p': tuple(left), 'q': tuple(right), 'budget': self.budget, 'verdict': verdict,
                    'status': status}
        return self._run("equivalence", tf.name, compute)

    def cancel_check(self, tf: TilingFile, max_len: int = DEFAULT_MAX_LEN):
        def compute():
            q = tf.quiver
            self._require_valid(q)
            outcome = cancellativity_search(q, superpotential_relations(q), max_len, self.budget)
            if outcome.verdict == COUNTEREXAMPLE:
                status = FALSIFIED
            elif outcome.verdict == INCONCLUSIVE:
                status = UNDECIDED
            else:
                status = COMPUTED
            return {'result': outcome, 'budget': self.budget, 'status': status}
        return self._run("cancellativity", tf.name, compute)

    def contract(self, tf: TilingFile, removal_len: int = DEFAULT_SEPARATION_LEN):
        def compute():
            q = tf.quiver
            self._require_valid(q)
            cmap = contract(q, tf.contracted)
            result = {'cmap': cmap, 'validation': validate_tiling(cmap.target), 'reduced': None,
                      'status': COMPUTED}
            reduced = remove_two_cycles(cmap.target)
            if reduced is not cmap.target:
                verdict, witness = check_two_cycle_removal(cmap.target, reduced, removal_len, self.budget)
                result.update({'reduced': reduced, 'removal': verdict, 'removal_len': removal_len,
                               'removal_witness': witness})
                if verdict == FAILED:
                    result['status'] = FALSIFIED
                elif verdict == INCONCLUSIVE:
                    result['status'] = UNDECIDED
            return result
        return self._run("contraction", tf.name, compute)

    def adequacy(self, tf: TilingFile, len_bound: int = DEFAULT_LEN_BOUND):
        def compute():
            q = tf.quiver
            self._require_valid(q)
            lab = self._require_labeling(tf)
            cmap = contract(q, tf.contracted)
            lab_prime = pushforward_labeling(cmap, lab)
            report = check_adequacy(cmap, lab_prime, len_bound)
            verdict = report.condition2.verdict
            status = {FAILED: FALSIFIED, INCONCLUSIVE: UNDECIDED}.get(verdict, COMPUTED)
            return {'report': report, 'contracted': cmap.contracted, 'labeling': lab_prime,
                    'status': status}
        return self._run("adequacy", tf.name, compute)

    def rings(self, tf: TilingFile, len_bound: int = DEFAULT_LEN_BOUND):
        def compute():
            q = tf.quiver
            self._require_valid(q)
            lab = self._require_labeling(tf)
            monoids = vertex_monoids(q, lab, len_bound)
            center = compute_R(q, lab, len_bound, monoids)
            if center.verdict == EQUAL_TO_S:
                gammas = list(center.S.generators)
            elif center.verdict == INCONCLUSIVE:
                gammas = []
            else:
                gammas = list(center.ideal)
            if lab.sigma not in gammas:
                gammas.append(lab.sigma)
            central = central_elements(q, superpotential_relations(q), lab, gammas, len_bound, self.budget)
            if center.verdict == INCONCLUSIVE:
                status = UNDECIDED
            elif any(c.verdict == NOT_CENTRAL for c in central):
                status = FALSIFIED
            else:
                status = COMPUTED
            return {'center': center, 'monoids': monoids, 'central': central, 'labeling': lab,
                    'sigma': lab.sigma, 'len_bound': len_bound, 'status': status}
        return self._run("rings", tf.name, compute)

    def labeling(self, tf: TilingFile, max_len: int = DEFAULT_SEPARATION_LEN):
        def compute():
            q = tf.quiver
            self._require_valid(q)
            lab = self._require_labeling(tf)
            report = verify_labeling(q, superpotential_relations(q), lab, max_len, self.budget)
            if not (report.sigma_uniform and report.relation_compatible) or report.separation == FAILED:
                status = FALSIFIED
            elif report.separation == INCONCLUSIVE:
                status = UNDECIDED
            else:
                status = COMPUTED
            return {'report': report, 'status': status}
        return self._run("labeling", tf.name, compute)

    def compare(self, tf: TilingFile, len_bound: int = DEFAULT_LEN_BOUND):
        def compute():
            q = tf.quiver
            self._require_valid(q)
            lab = self._require_labeling(tf)
            cmap = contract(q, tf.contracted)
            comparison = compare_S_Sprime(cmap, lab, pushforward_labeling(cmap, lab), len_bound)
            if comparison.verdict == DIFFER:
                status = FALSIFIED
            elif comparison.verdict == INCONCLUSIVE:
                status = UNDECIDED
            else:
                status = COMPUTED
            return {'comparison': comparison, 'status': status}
        return self._run("comparison", tf.name, compute)

    def geometry(self, source, len_bound: int = DEFAULT_LEN_BOUND):
        """环文件直接生成报告；铺砌文件先计算 R = k + J·S"""
        if isinstance(source, SubalgebraPresentation):
            return self._run("geometry", source.name, lambda: {'report': geometry_report(source),
                                                                'status': COMPUTED})

        def compute():
            q = source.quiver
            self._require_valid(q)
            lab = self._require_labeling(source)
            center = compute_R(q, lab, len_bound)
            if center.verdict == INCONCLUSIVE:
                return {'report': None, 'len_bound': len_bound, 'reason': center.reason,
                        'status': UNDECIDED}
            ideal = center.ideal if center.verdict != EQUAL_TO_S else [lab.unit]
            pres = SubalgebraPresentation(lab.variables, K_PLUS_IDEAL, tuple(ideal), (),
                                          tuple(center.S.generators), name=q.name)
            return {'report': geometry_report(pres), 'status': COMPUTED}
        return self._run("geometry", source.name, compute)

    def full_report(self, source, max_len: int = DEFAULT_MAX_LEN, len_bound: int = DEFAULT_LEN_BOUND,
                    separation_len: int = DEFAULT_SEPARATION_LEN):
        """validate → relations → cancel-check → contract → adequacy → rings → S/S' → geometry"""
        if isinstance(source, SubalgebraPresentation):
            return [self.geometry(source)]

        results = [self.validate(source)]
        if results[0].get('status') != COMPUTED:
            return results
        results.append(self.relations(source))
        results.append(self.cancel_check(source, max_len))
        has_labeling = bool(source.labels) or source.square
        if has_labeling:
            results.append(self.labeling(source, separation_len))
        if source.has_contraction:
            results.append(self.contract(source))
        if has_labeling:
            if source.has_contraction:
                results.append(self.adequacy(source, len_bound))
            results.append(self.rings(source, len_bound))
            if source.has_contraction:
                results.append(self.compare(source, len_bound))
            results.append(self.geometry(source, len_bound))
        return results


def exit_code(results: List[dict]) -> int:
    """输入错误优先，其次是被否定的性质，再次是无法判定"""
    codes = [EXIT_INPUT_ERROR if 'error' in r else STATUS_EXIT[r['status']] for r in results]
    for code in (EXIT_INPUT_ERROR, EXIT_FALSIFIED, EXIT_INCONCLUSIVE):
        if code in codes:
            return code
    return EXIT_COMPUTED


class _ArgumentParser(argparse.ArgumentParser):
    """参数错误按输入错误退出"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    common.add_argument('path', help='铺砌文件 (*.tiling) 或环文件 (*.ring)')
    common.add_argument('--budget', type=int, default=DEFAULT_BUDGET, help='等价类大小的预算')
    common.add_argument('--verbose', '-v', action='store_true', help='详细输出')

    parser = _ArgumentParser(prog='brane-tiling', description='砖块铺砌计算工具')
    commands = parser.add_subparsers(dest='command', required=True)

    commands.add_parser('validate', parents=[common], help='校验环面不变量')
    commands.add_parser('relations', parents=[common], help='列出超势关系与单位圈')
    equiv = commands.add_parser('equiv', parents=[common], help='判定两条路径是否等价: P -- Q')
    equiv.add_argument('p', nargs='+', help='第一条路径的箭头编号')
    cancel = commands.add_parser('cancel-check', parents=[common], help='搜索可消性反例')
    cancel.add_argument('--max-len', type=int, default=DEFAULT_MAX_LEN, help='路径长度上界')
    commands.add_parser('contract', parents=[common], help='收缩文件中声明的箭头')
    adequacy = commands.add_parser('adequacy', parents=[common], help='检查收缩的充分性')
    adequacy.add_argument('--len-bound', type=int, default=DEFAULT_LEN_BOUND, help='见证圈长度上界')
    rings = commands.add_parser('rings', parents=[common], help='计算 S 与 R')
    rings.add_argument('--len-bound', type=int, default=DEFAULT_LEN_BOUND, help='圈长度上界')
    geometry = commands.add_parser('geometry', parents=[common], help='闭点的几何报告')
    geometry.add_argument('--len-bound', type=int, default=DEFAULT_LEN_BOUND, help='圈长度上界')
    full = commands.add_parser('full-report', parents=[common], help='依次运行全部分析')
    full.add_argument('--max-len', type=int, default=DEFAULT_MAX_LEN, help='可消性搜索的长度上界')
    full.add_argument('--len-bound', type=int, default=DEFAULT_LEN_BOUND, help='圈长度上界')
    full.add_argument('--separation-len', type=int, default=DEFAULT_SEPARATION_LEN,
                      help='标注分离性检查的长度上界')
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """主函数"""
    argv = list(sys.argv[1:] if argv is None else argv)
    # equiv 的两条路径用 -- 分隔
    right: List[str] = []
    separated = '--' in argv
    if separated:
        split = argv.index('--')
        argv, right = argv[:split], argv[split + 1:]

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_INPUT_ERROR

    logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    if args.command == 'equiv' and (not separated or not right):
        print("❌ equiv 需要两条路径，用 -- 分隔: equiv <file> P... -- Q...")
        return EXIT_INPUT_ERROR
    if args.command != 'equiv' and right:
        print(f"❌ {args.command} 不接受 -- 之后的参数: {' '.join(right)}")
        return EXIT_INPUT_ERROR

    system = TilingAnalysisSystem(budget=args.budget)
    loaded = system.load(args.path)
    if 'error' in loaded:
        system.report_generator.print_error(loaded)
        return EXIT_INPUT_ERROR
    source = loaded['file']

    if isinstance(source, SubalgebraPresentation) and args.command not in ('geometry', 'full-report'):
        system.report_generator.print_error(
            {'name': source.name, 'error': f"环文件只支持 geometry 与 full-report 命令，而不是 {args.command}"})
        return EXIT_INPUT_ERROR

    logger.info(f"执行命令 {args.command}: {args.path}")
    if args.command == 'full-report':
        results = system.full_report(source, args.max_len, args.len_bound, args.separation_len)
        system.report_generator.generate_full_report(results)
        return exit_code(results)

    if args.command == 'validate':
        result = system.validate(source)
    elif args.command == 'relations':
        result = system.relations(source)
    elif args.command == 'equiv':
        result = system.equiv(source, args.p, right)
    elif args.command == 'cancel-check':
        result = system.cancel_check(source, args.max_len)
    elif args.command == 'contract':
        result = system.contract(source)
    elif args.command == 'adequacy':
        result = system.adequacy(source, args.len_bound)
    elif args.command == 'rings':
        result = system.rings(source, args.len_bound)
    else:
        result = system.geometry(source, args.len_bound)

    system.report_generator.generate(result)
    return exit_code([result])


if __name__ == "__main__":
    sys.exit(main())
