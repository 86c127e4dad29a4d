"""Techno-economic assessment of the line versus the manual baseline.

All money flows through exact rational arithmetic (`fractions.Fraction` built
from the decimal text of each input), then lands in integer cents at the
documented points:

  * per-asset energy and maintenance display cells truncate to cents;
  * column totals come from the unrounded sums, then truncate;
  * per-pound figures round half-up to cents *before* the profit subtraction;
  * the headline annual profit is rounded profit/lb times yearly pounds,
    with the unrounded identity (revenue - cost) reported alongside.

This is the only pipeline that reproduces every printed cell of the cost
tables simultaneously; the 3-cent gap between the energy total and the sum
of truncated rows is an artifact of the source tables and is preserved as a
separate field rather than patched.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .config import AssetLine, EconParams
from .jsonio import Fixed2
from .model import DomainError


def frac(x) -> Fraction:
    """Exact rational from a number's decimal text (0.1713 -> 1713/10000)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(Decimal(str(x)))


def truncate_cents(x: Fraction) -> Fixed2:
    """Drop sub-cent digits (toward zero for the non-negative money here)."""
    if x < 0:
        raise DomainError("truncate_cents expects non-negative amounts")
    return Fixed2((x * 100).__floor__())


def round_half_up_cents(x: Fraction) -> Fixed2:
    """Round to the nearest cent, halves away from zero."""
    if x >= 0:
        return Fixed2((x * 100 + Fraction(1, 2)).__floor__())
    return Fixed2(-((-x * 100 + Fraction(1, 2)).__floor__()))


def energy_cost(asset: AssetLine, p: EconParams) -> Fraction:
    """Annual electricity spend: kW x h/day x day/yr x rate (exact USD)."""
    return (frac(asset.power_w) / 1000 * frac(p.hours_per_day)
            * frac(p.days_per_year) * frac(p.electricity_rate))


def maintenance_cost(asset: AssetLine, p: EconParams) -> Fraction:
    rate = frac(asset.maintenance_rate if asset.maintenance_rate is not None
                else p.maintenance_rate)
    return rate * frac(asset.capital_usd)


def annual_capex(assets: list[AssetLine], p: EconParams) -> Fraction:
    """Straight-line amortisation of total capital, no discounting."""
    years = frac(p.amortization_years)
    if years <= 0:
        raise DomainError("amortization_years must be positive")
    return sum((frac(a.capital_usd) for a in assets), Fraction(0)) / years


def energy_total(p: EconParams) -> Fraction:
    return sum((energy_cost(a, p) for a in p.assets), Fraction(0))


def maintenance_total(p: EconParams) -> Fraction:
    return sum((maintenance_cost(a, p) for a in p.assets), Fraction(0))


def labor_cost(p: EconParams) -> Fraction:
    return (frac(p.labor_rate) * frac(p.hours_per_day) * frac(p.days_per_year)
            * frac(p.operators))


@dataclass
class EconSummary:
    """One row of the annual/per-lb comparisons, exact plus displayed."""

    hourly_throughput: float
    yearly_lbs: Fraction
    revenue: Fraction
    total_cost: Fraction
    cost_per_lb: Fixed2
    profit_per_lb: Fixed2
    annual_profit: Fixed2            # the headline (pipeline) figure
    annual_profit_unrounded: Fraction  # revenue - cost identity

    def to_dict(self) -> dict:
        return {
            "hourly_throughput_pcs": self.hourly_throughput,
            "yearly_lbs": round_half_up_cents(self.yearly_lbs),
            "revenue_usd": round_half_up_cents(self.revenue),
            "total_cost_usd": round_half_up_cents(self.total_cost),
            "cost_per_lb_usd": self.cost_per_lb,
            "profit_per_lb_usd": self.profit_per_lb,
            "annual_profit_usd": self.annual_profit,
            "annual_profit_unrounded_usd": round_half_up_cents(self.annual_profit_unrounded),
        }


def automated_economics(p: EconParams) -> EconSummary:
    """Economics of the automated line at its rated throughput."""
    units = frac(p.auto_phones_per_hour) * frac(p.hours_per_day) * frac(p.days_per_year)
    if units <= 0:
        raise DomainError("automated throughput must be positive")
    yearly_lbs = units * frac(p.phone_mass)
    revenue = frac(p.revenue_per_lb) * yearly_lbs
    total_cost = (annual_capex(p.assets, p) + energy_total(p)
                  + maintenance_total(p) + labor_cost(p))
    cost_per_lb = round_half_up_cents(total_cost / yearly_lbs)
    profit_per_lb = Fixed2(round_half_up_cents(frac(p.revenue_per_lb)) - cost_per_lb)
    annual_profit = round_half_up_cents(Fraction(profit_per_lb, 100) * yearly_lbs)
    return EconSummary(
        hourly_throughput=p.auto_phones_per_hour,
        yearly_lbs=yearly_lbs,
        revenue=revenue,
        total_cost=total_cost,
        cost_per_lb=cost_per_lb,
        profit_per_lb=profit_per_lb,
        annual_profit=annual_profit,
        annual_profit_unrounded=revenue - total_cost,
    )


def manual_economics(p: EconParams) -> EconSummary:
    """The manual baseline: labor is the only cost, tonnage as recorded.

    The recorded hourly rate (6.16 pcs/h) is used as printed even though
    60/9.6 would give 6.25; the annual profit row is the plain
    revenue-minus-cost difference, matching the recorded tables.
    """
    yearly_lbs = frac(p.manual_yearly_lbs)
    if yearly_lbs <= 0:
        raise DomainError("manual yearly pounds must be positive")
    revenue = frac(p.revenue_per_lb) * yearly_lbs
    total_cost = labor_cost(p)
    cost_per_lb = round_half_up_cents(total_cost / yearly_lbs)
    profit_per_lb = Fixed2(round_half_up_cents(frac(p.revenue_per_lb)) - cost_per_lb)
    annual_profit = round_half_up_cents(revenue - total_cost)
    return EconSummary(
        hourly_throughput=p.manual_phones_per_hour,
        yearly_lbs=yearly_lbs,
        revenue=revenue,
        total_cost=total_cost,
        cost_per_lb=cost_per_lb,
        profit_per_lb=profit_per_lb,
        annual_profit=annual_profit,
        annual_profit_unrounded=revenue - total_cost,
    )


def unsupervised_economics(p: EconParams, throughput_multiplier: Optional[float] = None,
                           include_labor: bool = False,
                           scale_opex: Optional[bool] = None) -> EconSummary:
    """What-if: no supervising operator, throughput scaled by a multiplier.

    By default energy and maintenance stay at their single-shift values
    (reproducing the recorded per-lb profit); ``scale_opex`` grows them with
    the duty cycle instead.
    """
    mult = frac(p.unsupervised_multiplier if throughput_multiplier is None
                else throughput_multiplier)
    if mult <= 0:
        raise DomainError("throughput multiplier must be positive")
    if scale_opex is None:
        scale_opex = p.scale_opex_with_throughput
    units = frac(p.auto_phones_per_hour) * frac(p.hours_per_day) * frac(p.days_per_year)
    yearly_lbs = units * frac(p.phone_mass) * mult
    revenue = frac(p.revenue_per_lb) * yearly_lbs
    opex = energy_total(p) + maintenance_total(p)
    if scale_opex:
        opex *= mult
    total_cost = annual_capex(p.assets, p) + opex
    if include_labor:
        total_cost += labor_cost(p)
    cost_per_lb = round_half_up_cents(total_cost / yearly_lbs)
    profit_per_lb = Fixed2(round_half_up_cents(frac(p.revenue_per_lb)) - cost_per_lb)
    annual_profit = round_half_up_cents(Fraction(profit_per_lb, 100) * yearly_lbs)
    return EconSummary(
        hourly_throughput=p.auto_phones_per_hour * float(mult),
        yearly_lbs=yearly_lbs,
        revenue=revenue,
        total_cost=total_cost,
        cost_per_lb=cost_per_lb,
        profit_per_lb=profit_per_lb,
        annual_profit=annual_profit,
        annual_profit_unrounded=revenue - total_cost,
    )


@dataclass
class BreakevenResult:
    status: str                    # "breakeven" | "never_profitable" | "undefined_positive"
    rate_usd_per_h: Optional[float]
    profit_at_rate: Optional[float]

    def to_dict(self) -> dict:
        return {"status": self.status, "rate_usd_per_h": self.rate_usd_per_h,
                "profit_at_rate_usd": self.profit_at_rate}


def breakeven_labor_rate(p: EconParams) -> BreakevenResult:
    """Labor rate at which the automated line's unrounded profit is zero.

    Solves revenue = capex + energy + maintenance + rate x hours x days x
    operators.  A negative root means the line loses money even with free
    labor ("never_profitable"); with no labor lever at all (zero operators
    or zero schedule) the answer is undefined and only the sign of profit
    is reported.
    """
    units = frac(p.auto_phones_per_hour) * frac(p.hours_per_day) * frac(p.days_per_year)
    yearly_lbs = units * frac(p.phone_mass)
    revenue = frac(p.revenue_per_lb) * yearly_lbs
    non_labor = annual_capex(p.assets, p) + energy_total(p) + maintenance_total(p)
    hours = frac(p.hours_per_day) * frac(p.days_per_year) * frac(p.operators)
    if hours == 0:
        profit = revenue - non_labor
        status = "undefined_positive" if profit > 0 else "never_profitable"
        return BreakevenResult(status, None, float(profit))
    rate = (revenue - non_labor) / hours
    profit_at_rate = revenue - non_labor - rate * hours  # exactly zero
    if rate < 0:
        return BreakevenResult("never_profitable", float(rate), float(profit_at_rate))
    return BreakevenResult("breakeven", float(rate), float(profit_at_rate))


def profit_at_labor_rate(p: EconParams, rate: float) -> float:
    """Unrounded annual profit of the automated line at a given labor rate."""
    units = frac(p.auto_phones_per_hour) * frac(p.hours_per_day) * frac(p.days_per_year)
    yearly_lbs = units * frac(p.phone_mass)
    revenue = frac(p.revenue_per_lb) * yearly_lbs
    cost = (annual_capex(p.assets, p) + energy_total(p) + maintenance_total(p)
            + frac(rate) * frac(p.hours_per_day) * frac(p.days_per_year) * frac(p.operators))
    return float(revenue - cost)


_SWEEPABLE = ("electricity_rate", "hours_per_day", "days_per_year", "amortization_years",
              "maintenance_rate", "labor_rate", "operators", "revenue_per_lb",
              "phone_mass", "auto_phones_per_hour", "unsupervised_multiplier")


def sensitivity_sweep(p: EconParams, axes: dict[str, list[float]]) -> list[dict]:
    """Evaluate the automated economics over a Cartesian grid of parameters.

    Returns one row per combination with the axis values and the resulting
    cost/profit figures; axis names must be EconParams fields.
    """
    from dataclasses import replace
    import itertools

    for name in axes:
        if name not in _SWEEPABLE:
            raise DomainError(
                f"unknown sweep axis {name!r}; economic axes: {', '.join(_SWEEPABLE)}")
    names = list(axes)
    rows = []
    for combo in itertools.product(*(axes[n] for n in names)):
        q = replace(p, **dict(zip(names, combo)))
        q.validate()
        summary = automated_economics(q)
        row = {n: v for n, v in zip(names, combo)}
        row.update({
            "cost_per_lb_usd": summary.cost_per_lb,
            "profit_per_lb_usd": summary.profit_per_lb,
            "annual_profit_usd": summary.annual_profit,
            "annual_profit_unrounded_usd": float(summary.annual_profit_unrounded),
        })
        rows.append(row)
    return rows


@dataclass
class TeaReport:
    """The three cost/comparison sub-tables plus derived figures."""

    asset_rows: list[dict]
    totals: dict
    revenue_per_lb: Fixed2
    automated: EconSummary
    manual: EconSummary
    unsupervised: EconSummary
    unsupervised_scaled: EconSummary
    breakeven: BreakevenResult

    def to_dict(self) -> dict:
        return {
            "capex_opex": {"assets": self.asset_rows, "totals": self.totals},
            "annual_comparison": {
                "proposed_system": self.automated.to_dict(),
                "traditional_process": self.manual.to_dict(),
            },
            "per_lb_comparison": {
                "proposed_system": {
                    "cost_usd_per_lb": self.automated.cost_per_lb,
                    "revenue_usd_per_lb": self.revenue_per_lb,
                    "profit_supervised_usd_per_lb": self.automated.profit_per_lb,
                    "profit_unsupervised_usd_per_lb": self.unsupervised.profit_per_lb,
                },
                "traditional_process": {
                    "cost_usd_per_lb": self.manual.cost_per_lb,
                    "revenue_usd_per_lb": self.revenue_per_lb,
                    "profit_supervised_usd_per_lb": self.manual.profit_per_lb,
                    "profit_unsupervised_usd_per_lb": None,
                },
            },
            "unsupervised_scaled_opex": {
                "profit_usd_per_lb": self.unsupervised_scaled.profit_per_lb,
                "cost_usd_per_lb": self.unsupervised_scaled.cost_per_lb,
            },
            "breakeven_labor": self.breakeven.to_dict(),
        }


def build_tea_report(p: EconParams) -> TeaReport:
    p.validate()
    asset_rows = []
    for a in p.assets:
        asset_rows.append({
            "name": a.name,
            "capital_usd": Fixed2(round_half_up_cents(frac(a.capital_usd))),
            "power_w": a.power_w if a.power_w != int(a.power_w) else int(a.power_w),
            "energy_usd_per_year": truncate_cents(energy_cost(a, p)),
            "maintenance_usd_per_year": truncate_cents(maintenance_cost(a, p)),
        })
    e_total = energy_total(p)
    m_total = maintenance_total(p)
    rows_energy_sum = Fixed2(sum(r["energy_usd_per_year"] for r in asset_rows))
    totals = {
        "capital_usd": Fixed2(round_half_up_cents(
            sum((frac(a.capital_usd) for a in p.assets), Fraction(0)))),
        "power_w": int(sum(a.power_w for a in p.assets)),
        "energy_usd_per_year": truncate_cents(e_total),
        "energy_usd_per_year_rowsum": rows_energy_sum,
        "maintenance_usd_per_year": truncate_cents(m_total),
        "annual_capex_usd": round_half_up_cents(annual_capex(p.assets, p)),
        "labor_usd_per_year": round_half_up_cents(labor_cost(p)),
    }
    return TeaReport(
        asset_rows=asset_rows,
        totals=totals,
        revenue_per_lb=round_half_up_cents(frac(p.revenue_per_lb)),
        automated=automated_economics(p),
        manual=manual_economics(p),
        unsupervised=unsupervised_economics(p, include_labor=False, scale_opex=False),
        unsupervised_scaled=unsupervised_economics(p, include_labor=False, scale_opex=True),
        breakeven=breakeven_labor_rate(p),
    )


# -- golden-table rendering ------------------------------------------------

SUBTABLE_FILES = ("subtable1.csv", "subtable2.csv", "subtable3.csv")


def render_subtables(report: TeaReport) -> dict[str, str]:
    """Render the three comparison tables as canonical CSV text."""
    t1 = ["category,capital_usd,power_w,energy_usd_per_year,maintenance_usd_per_year"]
    for r in report.asset_rows:
        t1.append(f"{r['name']},{r['capital_usd'].render()},{r['power_w']},"
                  f"{r['energy_usd_per_year'].render()},{r['maintenance_usd_per_year'].render()}")
    t = report.totals
    t1.append(f"Total,{t['capital_usd'].render()},{t['power_w']},"
              f"{t['energy_usd_per_year'].render()},{t['maintenance_usd_per_year'].render()}")

    def _f2(x: float) -> str:
        return Fixed2(round_half_up_cents(frac(x))).render()

    a, m = report.automated, report.manual
    t2 = ["category,hourly_throughput_pcs,yearly_throughput_lbs,total_revenue_usd,total_profit_usd"]
    t2.append(f"Proposed System,{_f2(a.hourly_throughput)},"
              f"{round_half_up_cents(a.yearly_lbs).render()},"
              f"{round_half_up_cents(a.revenue).render()},{a.annual_profit.render()}")
    t2.append(f"Traditional Process,{_f2(m.hourly_throughput)},"
              f"{round_half_up_cents(m.yearly_lbs).render()},"
              f"{round_half_up_cents(m.revenue).render()},{m.annual_profit.render()}")

    rev = report.revenue_per_lb.render()
    t3 = ["category,cost_usd_per_lb,revenue_usd_per_lb,profit_supervised_usd_per_lb,"
          "profit_unsupervised_usd_per_lb"]
    t3.append(f"Proposed System,{a.cost_per_lb.render()},{rev},"
              f"{a.profit_per_lb.render()},{report.unsupervised.profit_per_lb.render()}")
    t3.append(f"Traditional Process,{m.cost_per_lb.render()},{rev},"
              f"{m.profit_per_lb.render()},N/A")

    return {
        "subtable1.csv": "\n".join(t1) + "\n",
        "subtable2.csv": "\n".join(t2) + "\n",
        "subtable3.csv": "\n".join(t3) + "\n",
    }


def compare_golden(report: TeaReport, golden_dir: str | Path) -> list[str]:
    """Cell-by-cell diff of the rendered tables against committed CSVs.

    Returns a list of human-readable mismatch descriptions (empty = clean).
    """
    golden_dir = Path(golden_dir)
    rendered = render_subtables(report)
    mismatches = []
    for name in SUBTABLE_FILES:
        golden_path = golden_dir / name
        if not golden_path.exists():
            mismatches.append(f"{name}: golden file missing from {golden_dir}")
            continue
        got_rows = [r.split(",") for r in rendered[name].strip().splitlines()]
        want_rows = [r.split(",") for r in golden_path.read_text().strip().splitlines()]
        if len(got_rows) != len(want_rows):
            mismatches.append(f"{name}: {len(got_rows)} rows rendered vs {len(want_rows)} golden")
            continue
        header = got_rows[0]
        for i, (got, want) in enumerate(zip(got_rows, want_rows)):
            for j, (g, w) in enumerate(zip(got, want)):
                if g != w:
                    col = header[j] if j < len(header) else f"col{j}"
                    mismatches.append(f"{name} row {i} [{col}]: rendered {g!r} != golden {w!r}")
    return mismatches
