"""
CSV and JSON emitters. CSV floats carry CSV_DIGITS (17) significant digits in scientific
notation; JSON floats use the shortest repr that round-trips.
"""
from django.conf import settings
from rest_framework.renderers import JSONRenderer

from .serializers import FORMAT_CSV

CSV_SEPARATOR = ','
LINE_END = '\n'


def format_float(value: float) -> str:
    digits = settings.TRACY['CSV_DIGITS']
    return f"{value:.{digits - 1}e}"


def _format_cell(value) -> str:
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def render_csv(columns, rows) -> str:
    lines = [CSV_SEPARATOR.join(columns)]
    for row in rows:
        lines.append(CSV_SEPARATOR.join(_format_cell(row.get(column)) for column in columns))
    return LINE_END.join(lines) + LINE_END


def render_json(payload, indent: int = 2) -> str:
    context = {'indent': indent} if indent else {}
    return JSONRenderer().render(payload, renderer_context=context).decode('utf-8') + LINE_END


def render_record(record: dict, fmt: str, config: dict) -> str:
    """One result: a single-row table, or the record's keys followed by 'config'."""
    if fmt == FORMAT_CSV:
        return render_csv(list(record), [record])
    return render_json({**record, 'config': config})


def render_table(columns, rows, fmt: str, config: dict, extra: dict = None) -> str:
    """
    A sweep: one CSV row per point, or {'rows': [...], **extra, 'config': ...}
    :param extra: summary keys; in CSV they follow the table as one '# ' comment line each
    """
    extra = extra or {}
    if fmt == FORMAT_CSV:
        text = render_csv(columns, rows)
        for key, value in extra.items():
            if value is None:
                continue
            text += f"# {key} " + render_json(value, indent=0)
        return text
    return render_json({'rows': [{column: row.get(column) for column in columns} for row in rows],
                        **extra, 'config': config})
