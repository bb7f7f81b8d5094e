"""
Report formatters - JSON and plain text.
"""

import json
from typing import Any, Dict, List, Union

from hahnlab.runner import FAIL, INCONCLUSIVE, PASS, summarize

Reports = Union[Dict[str, Any], List[Dict[str, Any]]]

_MARKERS = {
    PASS: 'PASS',
    FAIL: 'FAIL',
    INCONCLUSIVE: '????',
}


def _as_list(data: Reports) -> List[Dict[str, Any]]:
    return [data] if isinstance(data, dict) else list(data)


def format_json(data: Reports) -> str:
    """
    Format scenario reports as JSON.

    A single report is emitted as one object; several as an array in the
    given order. Keys are sorted so equal runs give byte-identical output.

    Args:
        data: One report or a list of reports

    Returns:
        JSON string
    """
    reports = _as_list(data)
    payload = reports[0] if len(reports) == 1 else reports
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + '\n'


def _text_value(value: Any) -> str:
    if isinstance(value, str):
        return value
    return json.dumps(value, sort_keys=True, ensure_ascii=False)


def format_report_text(report: Dict[str, Any]) -> str:
    """Format one report as readable text, detailing every check that did not pass."""
    lines = [f"{report['scenario']}: {report.get('title', '')} (p={report['prime']})"]
    if report.get('field'):
        lines.append(f"  field: {report['field']}")
    for check in report['checks']:
        marker = _MARKERS.get(check['status'], check['status'])
        lines.append(f"  [{marker}] {check['id']}  {check['description']}")
        if check['status'] != PASS:
            lines.append(f"         paper_ref: {check['paper_ref']}")
            lines.append(f"         expected:  {_text_value(check['expected'])}")
            lines.append(f"         computed:  {_text_value(check['computed'])}")
    for note in report.get('notes', []):
        lines.append(f"  note: {note}")
    counts = summarize(report)
    lines.append("  " + ", ".join(f"{n} {s}" for s, n in counts.items()))
    return '\n'.join(lines)


def format_text(data: Reports) -> str:
    """
    Format scenario reports as text with PASS/FAIL markers.

    Args:
        data: One report or a list of reports

    Returns:
        Text with one block per scenario and a closing summary line
    """
    reports = _as_list(data)
    totals = {PASS: 0, FAIL: 0, INCONCLUSIVE: 0}
    blocks = []
    for report in reports:
        blocks.append(format_report_text(report))
        for status, n in summarize(report).items():
            totals[status] += n
    checks = sum(totals.values())
    summary = (
        f"Summary: {len(reports)} scenario(s), {checks} check(s): "
        + ", ".join(f"{n} {s}" for s, n in totals.items())
    )
    return '\n\n'.join(blocks + [summary]) + '\n'


def format_output(data: Reports, format_type: str) -> str:
    """
    Format reports in the specified format.

    Args:
        data: One report or a list of reports
        format_type: Output format (json, text)

    Returns:
        Formatted string

    Raises:
        ValueError: If format type is not supported
    """
    format_type = format_type.lower()

    if format_type == 'json':
        return format_json(data)
    elif format_type == 'text':
        return format_text(data)
    else:
        raise ValueError(f"Unsupported format: {format_type}")


def export_file(content: str, file_path: str) -> None:
    """
    Export content to a file.

    Args:
        content: Content to write
        file_path: Destination file path
    """
    with open(file_path, 'w', encoding='utf-8') as f:
        f.write(content)
