from collections import namedtuple
from decimal import Decimal

from django.conf import settings

from chain.exceptions import GasScheduleError, OutOfGasError

KIB = 1024
GWEI_PER_ETHER = Decimal(10) ** 9
StorageCost = namedtuple("StorageCost", ["payload_bytes", "gas", "ether", "usd", "transactions"])


class GasSchedule(namedtuple("GasSchedule", ["storage_gas_per_kib", "gas_limit", "gas_price_gwei", "eth_usd"])):
    __slots__ = ()

    @classmethod
    def default(cls, **overrides):
        values = {
            "storage_gas_per_kib": settings.DANKU_STORAGE_GAS_PER_KIB,
            "gas_limit": settings.DANKU_GAS_LIMIT,
            "gas_price_gwei": Decimal(settings.DANKU_GAS_PRICE_GWEI),
            "eth_usd": Decimal(settings.DANKU_ETH_USD),
        }
        values.update(overrides)
        return cls.create(**values)

    @classmethod
    def create(cls, storage_gas_per_kib, gas_limit, gas_price_gwei, eth_usd):
        schedule = cls(
            storage_gas_per_kib=int(storage_gas_per_kib),
            gas_limit=int(gas_limit),
            gas_price_gwei=Decimal(str(gas_price_gwei)),
            eth_usd=Decimal(str(eth_usd)),
        )
        for name in ("storage_gas_per_kib", "gas_limit"):
            if getattr(schedule, name) <= 0:
                raise GasScheduleError(f"{name} must be strictly positive")
        # zero prices are allowed
        for name in ("gas_price_gwei", "eth_usd"):
            if getattr(schedule, name) < 0:
                raise GasScheduleError(f"{name} must not be negative")
        return schedule


def storage_gas(schedule, payload_bytes):
    if payload_bytes < 0:
        raise ValueError(f"Payload size must not be negative (got {payload_bytes})")
    return payload_bytes * schedule.storage_gas_per_kib // KIB


def max_bytes_per_transaction(schedule):
    return schedule.gas_limit * KIB // schedule.storage_gas_per_kib


def storage_transactions(schedule, payload_bytes):
    """Number of transactions needed to write `payload_bytes` in increments"""

    if payload_bytes == 0:
        return 0
    chunk = max_bytes_per_transaction(schedule)
    if chunk == 0:
        return None  # not even a single byte fits under the gas limit
    return -(-payload_bytes // chunk)


def storage_cost_report(schedule, payload_bytes):
    gas = storage_gas(schedule, payload_bytes)
    ether = gas * schedule.gas_price_gwei / GWEI_PER_ETHER
    return StorageCost(
        payload_bytes=payload_bytes,
        gas=gas,
        ether=ether,
        usd=ether * schedule.eth_usd,
        transactions=storage_transactions(schedule, payload_bytes),
    )


class GasMeter:
    """Coarse per-transaction meter: one unit per arithmetic operation, per
    32-byte word hashed and per 32-byte word written to contract storage"""

    def __init__(self, limit):
        self.limit = limit
        self.used = 0
        self.used_by = {}

    def consume(self, amount, reason):
        if amount < 0:
            raise ValueError("Gas amount must not be negative")
        self.used += amount
        self.used_by[reason] = self.used_by.get(reason, 0) + amount
        if self.used > self.limit:
            raise OutOfGasError(self.used, self.limit, reason)

    def hash_words(self, count):
        self.consume(count, "hash")

    def store_words(self, count):
        self.consume(count, "storage")

    def compute(self, operations):
        self.consume(operations, "compute")


class NoGasMeter:
    """Meter that does not meter anything (off-chain evaluation)"""

    limit = None
    used = 0

    def consume(self, amount, reason):
        pass

    def hash_words(self, count):
        pass

    def store_words(self, count):
        pass

    def compute(self, operations):
        pass
