"""
Ledger state machine for spectrum_ledger.

The ledger owns everything the token modules share: the contract owner,
the simulated block clock, the ordered event log, the token-id counter and
the journal of successful commands used for replay. The ERC404-style
spectrum token and the ERC4907-style rental module hang off it as
``ledger.token`` and ``ledger.rental``.
"""

import json
from contextlib import contextmanager
from typing import Any, Dict, Iterator, List, Sequence, Tuple

from .errors import LedgerError, LedgerOverflowError, NotOwnerError, ZeroAddressError
from .models import (
    MAX_TIMESTAMP,
    Address,
    LedgerEvent,
    Timestamp,
    checked_add,
)
from .nfst_rental import NfstRental
from .spectrum_token import SpectrumToken
from .utils.logger import get_logger

logger = get_logger()

JournalEntry = Tuple[str, Dict[str, Any]]


class Ledger:
    """
    Single-contract ledger.

    All mutations are expected to be serialized by the caller; nothing here
    locks. Every mutating operation runs inside :meth:`command`, which keeps
    the journal free of nested sub-operations (the payment transfer inside a
    rental, the expiry sweep inside ``advance_time``).
    """

    def __init__(self, owner: Address):
        if owner.is_zero:
            raise ZeroAddressError("ledger owner cannot be the zero address")

        self.owner = owner
        self._time: Timestamp = 0
        self._events: List[LedgerEvent] = []
        self._journal: List[JournalEntry] = [("create_ledger", {"owner": owner.render()})]
        self._next_token_id = 1
        self._depth = 0

        self.token = SpectrumToken(self)
        self.rental = NfstRental(self, self.token)

        logger.debug(f"Ledger created with owner {owner.render()}")

    # ------------------------------------------------------------------
    # Plumbing used by the token modules

    @property
    def time(self) -> Timestamp:
        return self._time

    @property
    def next_token_id(self) -> int:
        return self._next_token_id

    def require_owner(self, caller: Address) -> None:
        if caller != self.owner:
            raise NotOwnerError(
                f"{caller.render()} is not the contract owner",
                {"caller": caller.render()},
            )

    def allocate_token_id(self) -> int:
        """Hand out the next id from the counter shared by NFTs and NFSTs."""
        token_id = self._next_token_id
        self._next_token_id += 1
        return token_id

    def emit(self, name: str, args: Sequence[Tuple[str, str]]) -> LedgerEvent:
        event = LedgerEvent(seq=len(self._events), at=self._time, name=name, args=tuple(args))
        self._events.append(event)
        logger.debug(f"Event #{event.seq} {name} {dict(event.args)}")
        return event

    @contextmanager
    def command(self, op: str, args: Dict[str, Any]) -> Iterator[None]:
        """
        Journal ``op`` if its body completes without raising.

        Only the outermost command is journaled. Operations validate before
        they mutate, so a raised LedgerError leaves no partial state behind.
        """
        self._depth += 1
        try:
            yield
        except LedgerError as e:
            if self._depth == 1:
                logger.debug(f"Command {op} rejected: {e}")
            raise
        finally:
            self._depth -= 1
        if self._depth == 0:
            self._journal.append((op, dict(args)))

    # ------------------------------------------------------------------
    # Ledger operations

    def advance_time(self, delta: int) -> Timestamp:
        """Move the block clock forward and run the expiry sweep."""
        if not isinstance(delta, int) or delta < 0:
            raise LedgerOverflowError(f"time delta must be a non-negative integer, got {delta!r}")

        new_time = checked_add(self._time, delta, what="timestamp", limit=MAX_TIMESTAMP)
        with self.command("advance_time", {"delta": delta}):
            self._time = new_time
            reset = self.rental.reset_expired(new_time)
            if reset:
                logger.debug(f"Expiry sweep at t={new_time} reset {reset} NFST(s)")
        return self._time

    def events(self) -> Tuple[LedgerEvent, ...]:
        return tuple(self._events)

    def commands(self) -> List[JournalEntry]:
        return [(op, dict(args)) for op, args in self._journal]

    def snapshot(self) -> Dict[str, Any]:
        """
        Build the StateDocument.

        Field order is fixed and maps are keyed by rendered address in
        ascending byte order, so equal states serialize to equal bytes.
        """
        return {
            "owner": self.owner.render(),
            "time": self._time,
            "ft_balances": self.token.balances_document(),
            "nft_holdings": self.token.holdings_document(),
            "channels": self.token.channels_document(),
            "nfst_records": self.rental.records_document(),
            "totalSupply_FT": str(self.token.total_supply_ft()),
            "totalSupply_NFT": self.token.total_supply_nft(),
            "next_token_id": self._next_token_id,
        }

    def render_snapshot(self) -> str:
        return render_document(self.snapshot())


def render_document(document: Dict[str, Any]) -> str:
    return json.dumps(document, indent=2, ensure_ascii=False) + "\n"


def create_ledger(owner: Address) -> Ledger:
    return Ledger(owner)


def replay(commands: Sequence[JournalEntry]) -> Ledger:
    """
    Rebuild a ledger from a journal produced by :meth:`Ledger.commands`.

    The first entry must be ``create_ledger``.
    """
    if not commands or commands[0][0] != "create_ledger":
        raise ValueError("journal must start with create_ledger")

    ledger = Ledger(Address.parse(commands[0][1]["owner"]))
    for op, args in commands[1:]:
        _apply_journal_entry(ledger, op, args)
    return ledger


def _apply_journal_entry(ledger: Ledger, op: str, args: Dict[str, Any]) -> None:
    if op == "mint_ft":
        ledger.token.mint_ft(Address.parse(args["caller"]), Address.parse(args["recipient"]), args["whole_units"])
    elif op == "upload_channel":
        ledger.token.upload_channel(Address.parse(args["caller"]), args["channel"], args["location"])
    elif op == "transfer":
        ledger.token.transfer(Address.parse(args["sender"]), Address.parse(args["recipient"]), int(args["amount"]))
    elif op == "mint_nfst":
        ledger.rental.mint_nfst(Address.parse(args["caller"]), args["channel"], args["location"])
    elif op == "list_nfst":
        ledger.rental.list_nfst(
            Address.parse(args["caller"]), args["token_id"], int(args["price"]), args["duration"]
        )
    elif op == "rent_nfst_by_user":
        ledger.rental.rent_nfst_by_user(args["token_id"], Address.parse(args["renter"]), args["now"])
    elif op == "advance_time":
        ledger.advance_time(args["delta"])
    elif op == "reset_expired":
        ledger.rental.reset_expired(args["now"])
    else:
        raise ValueError(f"unknown journal operation: {op}")
