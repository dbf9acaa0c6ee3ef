import rows

from chain.gas import storage_cost_report
from commitments.hashing import hash_data_group, rainbow_table_attack, serialize_data_group
from partitioning.probability import (
    OVERLAPPING,
    complement_probability_ratio,
    ideal_probability_ratio,
    monte_carlo_ideal_probability,
)
from partitioning.selection import PartitionConfig
from utils.conversion import make_table

PROBABILITY_FIELDS = [
    ("groups", rows.fields.IntegerField),
    ("formula_percent", rows.fields.TextField),
    ("exact_percent", rows.fields.TextField),
]
MONTE_CARLO_FIELDS = [
    ("mc_percent", rows.fields.TextField),
    ("mc_3sigma_percent", rows.fields.TextField),
]
GAS_FIELDS = [
    ("payload_bytes", rows.fields.IntegerField),
    ("gas", rows.fields.IntegerField),
    ("ether", rows.fields.TextField),
    ("usd", rows.fields.TextField),
    ("transactions", rows.fields.TextField),
]


def percent(value):
    return f"{float(value * 100):.6g}"


def probability_table(
    group_values, training_fraction, block_limit, trials, seed=0, window=OVERLAPPING, progress=False, workers=None
):
    """Chance that the organizer gets a chosen training set, per group count

    The target training set is the first G x TP indexes; Monte Carlo
    columns are only present when `trials` > 0."""

    fields = PROBABILITY_FIELDS + (MONTE_CARLO_FIELDS if trials else [])
    data = []
    for group_count in group_values:
        config = PartitionConfig.create(group_count, training_fraction, block_limit)
        row = {
            "groups": group_count,
            "formula_percent": percent(ideal_probability_ratio(config)),
            "exact_percent": percent(complement_probability_ratio(config)),
        }
        if trials:
            estimate = monte_carlo_ideal_probability(
                config, range(config.training_count), trials, seed, window=window, progress=progress, workers=workers
            )
            row["mc_percent"] = percent(estimate.estimate)
            row["mc_3sigma_percent"] = percent(3 * estimate.standard_error)
        data.append(row)
    return make_table(fields, data)


def gas_row(cost):
    return {
        "payload_bytes": cost.payload_bytes,
        "gas": cost.gas,
        "ether": f"{cost.ether:f}",
        "usd": f"{cost.usd:.2f}",
        "transactions": "-" if cost.transactions is None else str(cost.transactions),
    }


def gas_report(schedule, payload_sizes):
    """Storage cost (gas, ETH, USD) and transaction count per payload size"""

    return make_table(GAS_FIELDS, [gas_row(storage_cost_report(schedule, size)) for size in payload_sizes])


def evaluation_dataset_name(contract):
    if contract.revealed_testing:
        return "testing"
    elif contract.scores:
        return "training (fallback)"
    return "-"


def rainbow_table_recoveries(committed):
    """Groups an attacker holding every candidate group recovers, with the
    nonce fixed at 0 and with the nonces actually used"""

    groups = [item.group for item in committed]
    without_nonces = [hash_data_group(group, 0) for group in groups]
    with_nonces = [item.digest for item in committed]
    return len(rainbow_table_attack(without_nonces, groups)), len(rainbow_table_attack(with_nonces, groups))


def run_analytics(context):
    """(metric, value) pairs describing a finished scenario run"""

    config = context.config
    contract = config.contract
    group_count = len(config.points) // contract.group_size
    metrics = [
        ("dataset_points", len(config.points)),
        ("data_groups", group_count),
    ]

    partition_config = PartitionConfig.create(group_count, contract.training_fraction, contract.init2_block_limit)
    metrics.extend(
        [
            ("training_groups", partition_config.training_count),
            ("testing_groups", partition_config.testing_count),
            ("ideal_probability_formula_percent", percent(ideal_probability_ratio(partition_config))),
            ("ideal_probability_exact_percent", percent(complement_probability_ratio(partition_config))),
        ]
    )

    if context.committed:
        payload = sum(len(serialize_data_group(item.group, item.nonce)) for item in context.committed)
        cost = storage_cost_report(config.gas_schedule, payload)
        recovered_without_nonces, recovered_with_nonces = rainbow_table_recoveries(context.committed)
        metrics.extend(
            [
                ("committed_payload_bytes", payload),
                ("storage_gas", cost.gas),
                ("storage_ether", f"{cost.ether:f}"),
                ("storage_usd", f"{cost.usd:.2f}"),
                ("storage_transactions", "-" if cost.transactions is None else cost.transactions),
                ("rainbow_table_recovered_nonce_zero", f"{recovered_without_nonces}/{group_count}"),
                ("rainbow_table_recovered_random_nonces", f"{recovered_with_nonces}/{group_count}"),
            ]
        )
    if context.contract is not None:
        metrics.append(("evaluation_dataset", evaluation_dataset_name(context.contract)))
    metrics.append(("transaction_gas_total", sum(event.gas_used for event in context.events)))
    for name in sorted(context.analytics):
        metrics.append((name, context.analytics[name]))
    return [(name, str(value)) for name, value in metrics]
