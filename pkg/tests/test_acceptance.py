"""Release acceptance gate: one test per criterion, each printing its
pass/fail line with expected vs observed values at the stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the full table,
or ``phoneline validate`` for the same checks from the CLI.
"""


from phoneline import validate


def _run(check, *args):
    result = check(*args)
    status = "PASS" if result.passed else "FAIL"
    print(f"\nACCEPTANCE [{result.criterion:2d}] {status}  {result.name}")
    for line in result.details:
        print(f"    {line}")
    assert result.passed, "\n".join(result.details)


def test_criterion_01_capex_opex_table_cells_exact():
    _run(validate.check_capex_opex_table)


def test_criterion_02_automated_economics():
    _run(validate.check_automated_economics)


def test_criterion_03_manual_baseline_exact_cents():
    _run(validate.check_manual_economics)


def test_criterion_04_unsupervised_profit_conventions():
    _run(validate.check_unsupervised)


def test_criterion_05_breakeven_labor_rate():
    _run(validate.check_breakeven)


def test_criterion_06_metric_oracles():
    _run(validate.check_metric_oracles)


def test_criterion_07_confusion_sampling_distribution():
    _run(validate.check_confusion_sampling)


def test_criterion_08_throughput_sorting_and_bottleneck():
    _run(validate.check_throughput)


def test_criterion_09_end_to_end_success_and_hazards():
    _run(validate.check_end_to_end_success)


def test_criterion_10_determinism_and_geometry():
    _run(validate.check_determinism_and_geometry)
