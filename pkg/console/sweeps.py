import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List

from django.conf import settings
from pydantic import BaseModel, ConfigDict

from edge.painleve import hastings_mcleod

logger = logging.getLogger(__name__)

GRID_SEPARATOR = ':'
MAX_GRID_POINTS = 100000


class Grid(BaseModel):
    model_config = ConfigDict(frozen=True)

    text: str
    points: List[float]


def parse_grid(text: str) -> Grid:
    """
    Parse 'lo:hi:step' into the points lo, lo + step, ... up to hi
    The upper endpoint is included when it lies within half a step of the last point.
    """
    parts = text.split(GRID_SEPARATOR)
    if len(parts) != 3:
        raise ValueError(f"Grid {text!r} is not of the form lo:hi:step")
    try:
        lo, hi, step = (float(part) for part in parts)
    except ValueError:
        raise ValueError(f"Grid {text!r} has a non-numeric bound")
    if not all(math.isfinite(value) for value in (lo, hi, step)):
        raise ValueError(f"Grid {text!r} has a non-finite bound")
    if step <= 0.0:
        raise ValueError(f"Grid step must be positive, got {step}")
    if hi < lo:
        raise ValueError(f"Grid upper bound {hi} is below lower bound {lo}")
    count = int(math.floor((hi - lo) / step + 0.5))
    if count + 1 > MAX_GRID_POINTS:
        raise ValueError(f"Grid {text!r} has more than {MAX_GRID_POINTS} points")
    return Grid(text=text, points=[lo + i * step for i in range(count + 1)])


def tw_solution():
    """Hastings-McLeod table for the configured anchor, step and range (cached per process)."""
    tracy = settings.TRACY
    return hastings_mcleod(tracy['Y_START'], tracy['Y_END'], tracy['STEP'])


def _run_point(task, args):
    return task.apply(args=args).get()


def run_sweep(task, points, threads: int = 1):
    """
    Run task once per argument tuple in points; results come back in the order of points
    :param task: Celery task executed eagerly in this process
    :param threads: worker threads; 1 runs serially
    """
    points = [tuple(args) for args in points]
    logger.info(f"Sweep of {task.name} over {len(points)} points on {threads} thread(s)")
    if threads <= 1 or len(points) <= 1:
        return [_run_point(task, args) for args in points]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda args: _run_point(task, args), points))
