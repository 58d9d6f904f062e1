import logging

from celery import current_app

from edge.asymptotics import SOURCE_PAINLEVE, residual_table
from edge.painleve import tw_log_cdf
from laguerre.ensemble import dlog_routes, edge_gap, gap_log_det

from .sweeps import tw_solution

app = current_app._get_current_object()
logger = logging.getLogger(__name__)


@app.task
def tw_point_task(x):
    return tw_log_cdf(tw_solution(), x).model_dump()


@app.task
def residual_point_task(source, s, nodes, precision):
    solution = tw_solution() if source == SOURCE_PAINLEVE else None
    rows = residual_table(source, [s], nodes=nodes, precision=precision, solution=solution)
    return rows[0].model_dump()


@app.task
def laguerre_gap_task(n, alpha, route, nodes=None):
    return gap_log_det(n, alpha, route=route, m_nodes=nodes).model_dump()


@app.task
def laguerre_ddlog_task(n, alpha, nodes=None):
    return dlog_routes(n, alpha, m_nodes=nodes).model_dump()


@app.task
def edge_gap_task(n, s, nodes=None, centered=False):
    logger.debug(f"Edge gap for n={n}, s={s}, centered={centered}")
    return edge_gap(n, s, m_nodes=nodes, centered=centered).model_dump()
