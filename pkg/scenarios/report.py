import json

import rows

from utils.conversion import make_table, table_to_csv, table_to_text

TEXT, RECORDS = "text", "records"
FORMATS = (TEXT, RECORDS)

EVENT_FIELDS = [
    ("height", rows.fields.IntegerField),
    ("operation", rows.fields.TextField),
    ("caller", rows.fields.TextField),
    ("outcome", rows.fields.TextField),
    ("gas_used", rows.fields.IntegerField),
    ("detail", rows.fields.TextField),
]
SUBMISSION_FIELDS = [
    ("submission_id", rows.fields.IntegerField),
    ("submitter", rows.fields.TextField),
    ("payment_address", rows.fields.TextField),
    ("score", rows.fields.TextField),
    ("best", rows.fields.TextField),
]
GAS_FIELDS = [("operation", rows.fields.TextField), ("gas_used", rows.fields.IntegerField)]
NOTE_FIELDS = [
    ("height", rows.fields.IntegerField),
    ("actor", rows.fields.TextField),
    ("message", rows.fields.TextField),
]
METRIC_FIELDS = [("metric", rows.fields.TextField), ("value", rows.fields.TextField)]


def section(title, fields, data):
    if not data:
        return f"{title}: none\n"
    return f"{title}\n{table_to_text(make_table(fields, data))}"


def payout_line(report):
    if not report.payouts:
        return "Payout: none"
    payout = report.payouts[0]
    return f"Payout: {payout.amount} to {payout.recipient} at block {payout.height} ({payout.reason})"


def report_to_text(report):
    submissions = [
        {
            "submission_id": result.submission_id,
            "submitter": result.submitter,
            "payment_address": result.payment_address,
            "score": result.score,
            "best": "yes" if result.best else "",
        }
        for result in report.submissions
    ]
    gas = [{"operation": operation, "gas_used": gas_used} for operation, gas_used in report.gas_by_operation]
    metrics = [{"metric": name, "value": value} for name, value in report.analytics]
    phases = " -> ".join(f"{phase}@{height}" for height, phase in report.phase_history) or "-"
    parts = [
        f"Scenario: {report.scenario} (seed {report.seed}, final height {report.final_height})\n",
        f"Terminal phase: {report.phase or 'no contract'}\n",
        f"Phases: {phases}\n",
        payout_line(report) + "\n",
        "\n",
        section("Submissions", SUBMISSION_FIELDS, submissions),
        "\n",
        section("Events", EVENT_FIELDS, report.events),
        "\n",
        section("Gas by operation", GAS_FIELDS, gas),
        "\n",
        section("Notes", NOTE_FIELDS, [note._asdict() for note in report.notes]),
        "\n",
        section("Analytics", METRIC_FIELDS, metrics),
    ]
    return "".join(parts)


def report_records(report):
    yield {
        "type": "summary",
        "scenario": report.scenario,
        "seed": report.seed,
        "final_height": report.final_height,
        "phase": report.phase,
        "phase_history": [[height, phase] for height, phase in report.phase_history],
    }
    for payout in report.payouts:
        yield dict(payout._asdict(), type="payout")
    for result in report.submissions:
        yield dict(result._asdict(), type="submission")
    for event in report.events:
        yield dict(event, type="event")
    for note in report.notes:
        yield dict(note._asdict(), type="note")
    for name, value in report.analytics:
        yield {"type": "analytics", "metric": name, "value": value}


def report_to_records(report):
    """JSON lines with sorted keys, one record per line"""

    return "".join(json.dumps(record, sort_keys=True) + "\n" for record in report_records(report))


def render_report(report, output_format=TEXT):
    if output_format == TEXT:
        return report_to_text(report)
    elif output_format == RECORDS:
        return report_to_records(report)
    raise ValueError(f"Unknown format {output_format!r} (expected one of {', '.join(FORMATS)})")


def render_table(table, output_format=TEXT):
    """Text frame for people, CSV for machines"""

    if output_format == TEXT:
        return table_to_text(table)
    elif output_format == RECORDS:
        return table_to_csv(table)
    raise ValueError(f"Unknown format {output_format!r} (expected one of {', '.join(FORMATS)})")
