# 报告生成模块
import logging

import pandas as pd

from config import REPORT_WIDTH

logger = logging.getLogger(__name__)


def _word(word) -> str:
    return " ".join(word) if word else "(空)"


def _yes(flag: bool) -> str:
    return "yes" if flag else "no"


class ReportGenerator:
    """分析报告生成器：每个命令一个块，结论行使用固定的英文格式"""

    def __init__(self, width: int = REPORT_WIDTH):
        self.width = width

    def _header(self, title: str, name: str = ""):
        print("\n" + "=" * self.width)
        print(f"{title}: {name}" if name else title)
        print("=" * self.width)

    def _table(self, title: str, rows):
        if not rows:
            return
        print(f"\n{title}:")
        print(pd.DataFrame(rows).to_string(index=False))

    def print_error(self, result):
        self._header("错误", result.get('name', ''))
        print(f"❌ 错误: {result['error']}")

    def generate_validation_report(self, result):
        self._header("铺砌校验", result['name'])
        q = result['quiver']
        print(f"vertices: {len(q.vertices)}")
        print(f"arrows: {len(q.arrows)}")
        print(f"faces: {len(q.faces)}")
        report = result['report']
        print(f"validation: {'ok' if report.ok else 'failed'}")
        self._table("违例", [{'不变量': v.invariant, '详情': v.detail} for v in report.violations])

    def generate_relations_report(self, result):
        self._header("超势关系", result['name'])
        print(f"relations: {len(result['relations'])}")
        self._table("关系列表", [
            {'见证箭头': r.witness, 'd': _word(r.left), "d'": _word(r.right)}
            for r in result['relations']
        ])
        self._table("单位圈", [
            {'顶点': v, 'u': str(u), '交换': result['centrality'].get(v, '')}
            for v, u in result['unit_cycles'].items()
        ])
        print(f"\nunit cycles central: {result['unit_cycles_central']}")

    def generate_equivalence_report(self, result):
        self._header("路径等价", result['name'])
        print(f"p: {_word(result['p'])}")
        print(f"q: {_word(result['q'])}")
        print(f"budget: {result['budget']}")
        print(result['verdict'])

    def generate_cancellativity_report(self, result):
        self._header("可消性搜索", result['name'])
        outcome = result['result']
        print(f"max-len: {outcome.max_len}")
        print(f"budget: {result['budget']}")
        print(f"cancellativity: {outcome.summary()}")
        if outcome.counterexample is not None:
            print(f"  {outcome.counterexample.describe()}")

    def generate_contraction_report(self, result):
        self._header("箭头收缩", result['name'])
        cmap = result['cmap']
        target = cmap.target
        print(f"contracted: {_word(sorted(cmap.contracted))}")
        print(f"Q': {len(target.vertices)} vertices, {len(target.arrows)} arrows, {len(target.faces)} faces")
        print(f"Q' validation: {'ok' if result['validation'].ok else 'failed'}")
        self._table("顶点合并", [{'顶点': v, '代表': r} for v, r in sorted(cmap.vertex_merge.items())])
        self._table("Q' 的箭头", [
            {'箭头': a.id, '尾': a.tail, '头': a.head, '偏移': f"{a.offset[0]} {a.offset[1]}"}
            for a in target.arrows
        ])
        self._table("Q' 的面", [
            {'符号': '+' if f.sign == 1 else '-', '边界': _word(f.boundary)} for f in target.faces
        ])
        reduced = result.get('reduced')
        if reduced is not None:
            removed = sorted(set(target.arrow_ids) - set(reduced.arrow_ids))
            print(f"\n2-cycles removed: {_word(removed)}")
            print(f"Q'': {len(reduced.vertices)} vertices, {len(reduced.arrows)} arrows, {len(reduced.faces)} faces")
            print(f"2-cycle removal check: {result['removal']} up to {result['removal_len']}")
            if result.get('removal_witness'):
                left, right = result['removal_witness']
                print(f"  witness: {_word(left)} / {_word(right)}")
        else:
            print("\n2-cycles removed: none")

    def generate_adequacy_report(self, result):
        self._header("充分性检查", result['name'])
        report = result['report']
        c2 = report.condition2
        print(f"contracted: {_word(sorted(result['contracted']))}")
        print(f"len-bound: {c2.len_bound}")
        print(f"condition 1 (sufficient criterion): {report.condition1_sufficient}")
        print(f"condition 2: {c2.verdict}")
        if c2.failing_generator is not None:
            print(f"  failing generator: {result['labeling'].format(c2.failing_generator)}")
        if c2.reason:
            print(f"  {c2.reason}")
        self._table("各顶点", [{'顶点': v, '条件 2': verdict} for v, verdict in sorted(c2.verdicts.items())])
        self._table("见证圈", [
            {'基点': w.vertex, '圈': _word(w.word), '像': result['labeling'].format(w.image),
             '同调': f"{w.homology[0]} {w.homology[1]}"}
            for w in c2.witnesses
        ])

    def generate_rings_report(self, result):
        self._header("中心与 toric 环", result['name'])
        center = result['center']
        fmt = result['labeling'].format
        print(f"len-bound: {result['len_bound']}")
        print(f"sigma: {fmt(result['sigma'])}")
        print(f"S = {center.S.formatted()}")
        print(center.r_line())
        if center.reason:
            print(f"  {center.reason}")
        self._table("各顶点的圈幺半群", [
            {'顶点': v, '生成元': ", ".join(fmt(g) for g in m.generators)}
            for v, m in result['monoids'].items()
        ])
        self._table("中心元素", [
            {'γ': fmt(c.gamma), '结论': c.verdict, '备选圈': c.alternatives_checked,
             '圈': "; ".join(f"{v}: {_word(w)}" for v, w in sorted(c.cycles.items()))}
            for c in result['central']
        ])

    def generate_labeling_report(self, result):
        self._header("标注检查", result['name'])
        report = result['report']
        print(f"sigma-uniform: {_yes(report.sigma_uniform)}")
        print(f"relation-compatible: {_yes(report.relation_compatible)}")
        print(f"separation: {report.separation} up to {report.max_len}")
        if report.separation_witness:
            left, right = report.separation_witness
            print(f"  witness: {_word(left)} / {_word(right)}")
        print("surjectivity conditions: not decided")

    def generate_comparison_report(self, result):
        self._header("收缩前后的 S", result['name'])
        comparison = result['comparison']
        print(f"len-bound: {comparison.S.len_bound}")
        print(f"S = {comparison.S.formatted()}")
        print(f"S' = {comparison.S_prime.formatted()}")
        print(comparison.line())

    def generate_geometry_report(self, result):
        self._header("几何报告", result['name'])
        report = result['report']
        if report is None:
            print(f"geometry: inconclusive at len-bound {result['len_bound']}")
            if result.get('reason'):
                print(f"  {result['reason']}")
            return
        pres = report.presentation
        print(pres.s_line())
        print(pres.r_line())
        print(f"U complement: {report.loci.U_complement}")
        print(f"W complement: {report.loci.W_complement}")
        if report.loci.collapsed:
            print(f"collapsed: {report.loci.collapsed}")
        print(f"closed point: {report.closed_point}")
        if report.geometric_dimension is not None:
            print(f"geometric dimension (dim_S for the given S): {report.geometric_dimension}")
        else:
            print("geometric dimension: unsupported for this form")
        print(f"dim_S R = trdeg Frac R = dim S = {report.dimensions.common}")
        print(f"depiction: {report.depiction}")
        print(f"birational: {_yes(report.birational)}")
        print(f"maximal depiction: {report.uniqueness}")

    def generate(self, result):
        """按结果类型分派"""
        if 'error' in result:
            self.print_error(result)
            return
        handler = getattr(self, f"generate_{result['kind']}_report")
        handler(result)

    def generate_full_report(self, results):
        for result in results:
            self.generate(result)
        self.print_statistics(results)

    def print_statistics(self, results):
        """汇总各步骤的结论"""
        print("\n" + "=" * self.width)
        print("汇总")
        print("=" * self.width)
        rows = [{'步骤': r.get('kind', 'error'), '状态': r.get('status', 'error')} for r in results]
        print(pd.DataFrame(rows).to_string(index=False))
        print("=" * self.width)
