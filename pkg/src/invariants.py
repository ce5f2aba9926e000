"""
Invariant suite for spectrum_ledger.

``InvariantChecker.check()`` inspects the whole ledger and raises
InvariantViolationError on the first broken property. Event-derived checks
(sequence numbers, token-id monotonicity) are incremental, so checking
after every command of a long run stays linear in the event count.
"""

from typing import TYPE_CHECKING, Set

from .errors import InvariantViolationError
from .models import (
    EVENT_ARG_KEYS,
    EVENT_NAMES,
    TRANSFER_NFST,
    TRANSFER_NFT,
    UNIT,
    ZERO_ADDRESS,
    floor_units,
)

if TYPE_CHECKING:
    from .ledger import Ledger


class InvariantChecker:
    """Stateful checker bound to one ledger."""

    def __init__(self, ledger: "Ledger"):
        self.ledger = ledger
        self._events_seen = 0
        self._last_minted_id = 0
        self._last_time = 0
        self.checks_run = 0

    def _fail(self, prop: str, message: str) -> None:
        raise InvariantViolationError(f"{prop}: {message}", {"property": prop})

    def check(self) -> None:
        self.check_time()
        self.check_events()
        self.check_conservation()
        self.check_supply_lockstep()
        self.check_floor_law()
        self.check_channel_binding()
        self.check_rentals()
        self.check_zero_address()
        self.checks_run += 1

    # ------------------------------------------------------------------

    def check_time(self) -> None:
        if self.ledger.time < self._last_time:
            self._fail("time", f"clock moved back from {self._last_time} to {self.ledger.time}")
        self._last_time = self.ledger.time

    def check_events(self) -> None:
        events = self.ledger.events()
        for event in events[self._events_seen:]:
            if event.seq != self._events_seen:
                self._fail("event-seq", f"expected seq {self._events_seen}, got {event.seq}")
            if event.name not in EVENT_NAMES:
                self._fail("event-shape", f"unknown event {event.name!r} at seq {event.seq}")
            keys = tuple(key for key, _ in event.args)
            if keys != EVENT_ARG_KEYS[event.name]:
                self._fail("event-shape", f"{event.name} at seq {event.seq} has args {keys}")
            if event.name in (TRANSFER_NFT, TRANSFER_NFST) and event.arg("_from") == ZERO_ADDRESS.render():
                key = "_tokenId" if event.name == TRANSFER_NFT else "_tokenIdOfNFST"
                token_id = int(event.arg(key))
                if token_id <= self._last_minted_id:
                    self._fail("token-id", f"id {token_id} minted after id {self._last_minted_id}")
                self._last_minted_id = token_id
            self._events_seen += 1

    def check_conservation(self) -> None:
        token = self.ledger.token
        total = sum(token.balance_of(a) for a in token.holders())
        if total != token.total_supply_ft():
            self._fail("conservation", f"sum of balances {total} != totalSupply_FT {token.total_supply_ft()}")

    def check_supply_lockstep(self) -> None:
        token = self.ledger.token
        if token.total_supply_ft() != token.total_supply_nft() * UNIT:
            self._fail(
                "lockstep",
                f"totalSupply_FT {token.total_supply_ft()} != {token.total_supply_nft()} x UNIT",
            )

    def check_floor_law(self) -> None:
        token = self.ledger.token
        accounts = set(token.holders()) | {nft.holder for nft in token.live_nfts()}
        for account in accounts:
            expected = 0 if token.is_exempt(account) else floor_units(token.balance_of(account))
            if token.nft_count(account) != expected:
                self._fail(
                    "floor-law",
                    f"{account.render()} holds {token.nft_count(account)} NFT(s), expected {expected}",
                )

    def check_channel_binding(self) -> None:
        token = self.ledger.token
        live = {nft.token_id: nft for nft in token.live_nfts()}
        seen_channels: Set[str] = set()
        bound = 0
        for record in token.channel_records():
            if record.bound_nft is None:
                continue
            bound += 1
            nft = live.get(record.bound_nft)
            if nft is None or nft.channel != record.channel:
                self._fail("channel-binding", f"{record.channel} bound to non-matching NFT {record.bound_nft}")
        for nft in live.values():
            if nft.channel in seen_channels:
                self._fail("channel-uniqueness", f"channel {nft.channel} backs more than one NFT")
            seen_channels.add(nft.channel)
        if bound != len(live):
            self._fail("channel-binding", f"{bound} occupied channel(s) for {len(live)} live NFT(s)")
        if len(live) > token.total_supply_nft():
            self._fail("supply-cap", f"{len(live)} live NFTs exceed totalSupply_NFT {token.total_supply_nft()}")
        for token_id in live:
            if token_id >= self.ledger.next_token_id:
                self._fail("token-id", f"live id {token_id} not below counter {self.ledger.next_token_id}")

    def check_rentals(self) -> None:
        now = self.ledger.time
        for record in self.ledger.rental.records():
            if record.owner.is_zero:
                self._fail("rental", f"NFST {record.token_id} owned by the zero address")
            if not record.user.is_zero:
                if record.expire_time <= 0 or not record.listed:
                    self._fail("rental", f"NFST {record.token_id} has a user without expiry or listing")
                if record.user == record.owner:
                    self._fail("rental", f"NFST {record.token_id} rented by its owner")
                # the sweep runs on every clock advance
                if record.expire_time < now:
                    self._fail("rental-expiry", f"NFST {record.token_id} expired at {record.expire_time} but kept its user")

    def check_zero_address(self) -> None:
        token = self.ledger.token
        if token.balance_of(ZERO_ADDRESS) or token.nft_count(ZERO_ADDRESS):
            self._fail("zero-address", "zero address holds tokens")
        if ZERO_ADDRESS in token.holders():
            self._fail("zero-address", "zero address appears as a balance holder")
