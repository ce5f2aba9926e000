"""
Shared pytest fixtures for spectrum_ledger.

The named accounts use a fixed PU address and
name-derived addresses for the secondary users.
"""

from pathlib import Path

import pytest

from src.ledger import Ledger, create_ledger
from src.models import UNIT, Address

ROOT = Path(__file__).resolve().parent
SCENARIOS_DIR = ROOT / "data" / "scenarios"
FIXTURES_DIR = ROOT / "data" / "fixtures"

PU = Address.parse("0x0aa7652B45d957B9d2dE60AFbbD90b2DaD3d1f60")
SU1 = Address.from_name("SU1")
SU2 = Address.from_name("SU2")
SU3 = Address.from_name("SU3")
SU4 = Address.from_name("SU4")


def supplied_ledger(units: int, channels: int = None) -> Ledger:
    """Owner holds ``units`` FT backed by ``channels`` uploaded channels."""
    ledger = create_ledger(PU)
    ledger.token.mint_ft(PU, PU, units)
    for i in range(1, (units if channels is None else channels) + 1):
        ledger.token.upload_channel(PU, f"Channel{i}", f"Location{i}")
    return ledger


@pytest.fixture
def ledger() -> Ledger:
    return create_ledger(PU)


@pytest.fixture
def funded_ledger() -> Ledger:
    """PU with 8 FT and 8 channels."""
    return supplied_ledger(8)


@pytest.fixture
def su3_ledger() -> Ledger:
    """PU 8 FT, SU3 2 FT holding 2 NFTs."""
    ledger = supplied_ledger(10)
    ledger.token.transfer(PU, SU3, 2 * UNIT)
    return ledger


@pytest.fixture
def listed_ledger() -> Ledger:
    """NFST 1 on Channel1 listed at 0.1 FT for 86400 s; SU2 holds 0.1 FT."""
    ledger = supplied_ledger(8)
    ledger.rental.mint_nfst(PU, "Channel1", "Location1")
    ledger.rental.list_nfst(PU, 1, UNIT // 10, 86400)
    ledger.token.transfer(PU, SU2, UNIT // 10)
    return ledger
