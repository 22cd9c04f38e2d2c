"""Side-by-side runs of one scenario under several strategies and devices"""
import itertools
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Optional, Sequence, Tuple

from . import logger
from .exceptions import InsufficientComparisonError
from .models import ComparisonReport, ComparisonRow, DeviceProfile, Scenario, Strategy
from .presets import REFERENCE_LATENCIES
from .session import run_session


def compare_strategies(scenario: Scenario, strategies: Sequence[Strategy], devices: Sequence[DeviceProfile],
                       max_workers: Optional[int] = None, **run_options) -> ComparisonReport:
    """
    Runs the scenario for every strategy on every device. Runs share nothing mutable (each gets its own agent, queue
    and device store), so they go in parallel.
    :param scenario: ride to simulate
    :param strategies: strategies to compare
    :param devices: devices to compare
    :param max_workers: thread count, one per run by default
    :param run_options: passed to :func:`run_session`; `agent` and `store_root` are not allowed
    :return: comparison report; its `sessions` keep the full session reports in row order
    """
    pairs = list(itertools.product(strategies, devices))
    if len(pairs) < 2:
        raise InsufficientComparisonError(f'At least two strategy and device pairs are compared, got {len(pairs)}')
    if 'agent' in run_options or 'store_root' in run_options:
        raise ValueError('Compared runs cannot share an agent or a device store')

    with ThreadPoolExecutor(max_workers=max_workers or len(pairs)) as executor:
        futures = [executor.submit(run_session, scenario, strategy, device, **run_options)
                   for strategy, device in pairs]
        reports = [future.result() for future in futures]

    rows = tuple(ComparisonRow.from_report(report) for report in reports)
    by_pair: Dict[Tuple[str, str], float] = {(row.strategy, row.device): row.mean_latency_ms for row in rows}
    logger.info(f'Scenario {scenario.session_id.hex()} was compared over {len(rows)} runs: {by_pair}')
    return ComparisonReport(session_id=scenario.session_id, rows=rows, references=REFERENCE_LATENCIES,
                            sessions=tuple(reports))
