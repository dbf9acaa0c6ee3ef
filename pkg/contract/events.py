import json
from collections import namedtuple

ACCEPTED, REJECTED, CANCELLED = "accepted", "rejected", "cancelled"

Event = namedtuple("Event", ["height", "operation", "caller", "outcome", "gas_used", "detail"])


class EventLog:
    """Append-only record of every contract transaction, accepted or not"""

    def __init__(self):
        self._events = []

    def __len__(self):
        return len(self._events)

    def __iter__(self):
        return iter(self._events)

    def append(self, height, operation, caller, outcome, gas_used, detail=""):
        event = Event(
            height=height, operation=operation, caller=caller, outcome=outcome, gas_used=gas_used, detail=detail,
        )
        self._events.append(event)
        return event

    def filter(self, operation=None, outcome=None):
        return [
            event
            for event in self._events
            if (operation is None or event.operation == operation) and (outcome is None or event.outcome == outcome)
        ]

    def to_records(self):
        return [event._asdict() for event in self._events]

    def to_json_lines(self):
        return "".join(json.dumps(dict(record), sort_keys=True) + "\n" for record in self.to_records())

    def gas_by_operation(self):
        totals = {}
        for event in self._events:
            totals[event.operation] = totals.get(event.operation, 0) + event.gas_used
        return totals
