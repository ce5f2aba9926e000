"""
ERC4907-style rentable spectrum tokens (NFSTs) for spectrum_ledger.

The owner mints an NFST per uploaded channel, lists it at a fixed price and
duration, and secondary users rent it by paying the price in FT. Expiry is
resolved lazily by :meth:`NfstRental.user_of`; the ledger also sweeps
expired rentals back to the zero user whenever time advances.
"""

from dataclasses import replace
from typing import TYPE_CHECKING, Dict, List, Optional

from .errors import (
    AlreadyRentedError,
    InsufficientBalanceError,
    LedgerOverflowError,
    NotListedError,
    NotNfstOwnerError,
    SelfRentalError,
    UnknownChannelError,
    UnknownTokenError,
    ZeroAddressError,
    ZeroDurationError,
    ZeroPriceError,
)
from .models import (
    MAX_TIMESTAMP,
    MAX_UINT256,
    RENT_NFST_BY_OWNER,
    RENT_NFST_BY_USER,
    TRANSFER_NFST,
    ZERO_ADDRESS,
    Address,
    NfstRecord,
    Timestamp,
    TokenAmount,
    checked_add,
)
from .utils.logger import get_logger

if TYPE_CHECKING:
    from .ledger import Ledger
    from .spectrum_token import SpectrumToken

logger = get_logger()


class NfstRental:
    """NFST registry and rental state, keyed by token id."""

    def __init__(self, ledger: "Ledger", token: "SpectrumToken"):
        self._ledger = ledger
        self._token = token
        self._records: Dict[int, NfstRecord] = {}

    def _now(self, now: Optional[Timestamp]) -> Timestamp:
        return self._ledger.time if now is None else now

    def _record(self, token_id: int) -> NfstRecord:
        record = self._records.get(token_id)
        if record is None:
            raise UnknownTokenError(f"no NFST with id {token_id}", {"token_id": token_id})
        return record

    # ------------------------------------------------------------------
    # Mutations

    def mint_nfst(self, caller: Address, channel: str, location: str) -> int:
        self._ledger.require_owner(caller)
        if not self._token.has_channel(channel):
            raise UnknownChannelError(f"channel {channel!r} was never uploaded", {"channel": channel})

        args = {"caller": caller.render(), "channel": channel, "location": location}
        with self._ledger.command("mint_nfst", args):
            token_id = self._ledger.allocate_token_id()
            self._records[token_id] = NfstRecord(
                token_id=token_id, owner=caller, channel=channel, location=location
            )
            self._ledger.emit(TRANSFER_NFST, [
                ("_from", ZERO_ADDRESS.render()),
                ("_to", caller.render()),
                ("_tokenIdOfNFST", str(token_id)),
            ])

        logger.debug(f"Minted NFST {token_id} for {channel}@{location}")
        return token_id

    def list_nfst(self, caller: Address, token_id: int, price: TokenAmount, duration: int) -> None:
        """Set the rental terms. A re-listing only affects the next rental."""
        record = self._record(token_id)
        if caller != record.owner:
            raise NotNfstOwnerError(
                f"{caller.render()} does not own NFST {token_id}",
                {"caller": caller.render(), "token_id": token_id},
            )
        if not isinstance(price, int) or price <= 0:
            raise ZeroPriceError(f"price must be positive, got {price!r}")
        if not isinstance(duration, int) or duration <= 0:
            raise ZeroDurationError(f"duration must be positive, got {duration!r}")
        if price > MAX_UINT256:
            raise LedgerOverflowError(f"price out of range: {price}")
        if duration > MAX_TIMESTAMP:
            raise LedgerOverflowError(f"duration out of range: {duration}")

        args = {"caller": caller.render(), "token_id": token_id, "price": str(price), "duration": duration}
        with self._ledger.command("list_nfst", args):
            record.price = price
            record.duration = duration
            self._ledger.emit(RENT_NFST_BY_OWNER, [
                ("_tokenIdOfNFST", str(token_id)),
                ("_price", str(price)),
                ("_duration", str(duration)),
            ])

    def rent_nfst_by_user(self, token_id: int, renter: Address, now: Optional[Timestamp] = None) -> None:
        """
        Pay the listed price from ``renter`` to the NFST owner and assign use
        until ``now + duration`` (inclusive). ``now`` defaults to the ledger clock.

        The payment is an ordinary token transfer, so the renter may lose
        NFTs if the payment breaks a whole FT.
        """
        now = self._now(now)
        if now < self._ledger.time:
            raise LedgerOverflowError(
                f"rental time {now} is before the ledger clock {self._ledger.time}",
                {"now": now, "time": self._ledger.time},
            )
        record = self._record(token_id)
        if renter.is_zero:
            raise ZeroAddressError("renter cannot be the zero address")
        if record.rented_at(now):
            raise AlreadyRentedError(
                f"NFST {token_id} is rented by {record.user.render()} until {record.expire_time}",
                {"token_id": token_id, "expire_time": record.expire_time},
            )
        if not record.listed:
            raise NotListedError(f"NFST {token_id} has no listing", {"token_id": token_id})
        if renter == record.owner:
            raise SelfRentalError(f"owner cannot rent NFST {token_id}", {"token_id": token_id})

        balance = self._token.balance_of(renter)
        if balance < record.price:
            raise InsufficientBalanceError(
                f"{renter.render()} holds {balance} wei, rent is {record.price}",
                {"balance": balance, "amount": record.price},
            )
        expire_time = checked_add(record.duration, now, what="expire_time", limit=MAX_TIMESTAMP)

        args = {"token_id": token_id, "renter": renter.render(), "now": now}
        with self._ledger.command("rent_nfst_by_user", args):
            self._token.transfer(renter, record.owner, record.price)
            record.user = renter
            record.expire_time = expire_time
            self._ledger.emit(RENT_NFST_BY_USER, [
                ("_tokenIdOfNFST", str(token_id)),
                ("_renter", renter.render()),
            ])

        logger.debug(f"NFST {token_id} rented by {renter.render()} until {expire_time}")

    def reset_expired(self, now: Optional[Timestamp] = None) -> int:
        """Clear every rental whose expiry lies strictly before ``now``."""
        now = self._now(now)
        expired = [r for r in self._records.values() if not r.user.is_zero and r.expire_time < now]
        if not expired:
            return 0

        with self._ledger.command("reset_expired", {"now": now}):
            for record in expired:
                record.user = ZERO_ADDRESS
                record.expire_time = 0
        return len(expired)

    # ------------------------------------------------------------------
    # Queries

    def user_of(self, token_id: int, now: Optional[Timestamp] = None) -> Address:
        record = self._record(token_id)
        return record.user if record.rented_at(self._now(now)) else ZERO_ADDRESS

    def expire_time_of(self, token_id: int) -> Timestamp:
        return self._record(token_id).expire_time

    def is_rented(self, token_id: int, now: Optional[Timestamp] = None) -> bool:
        return self._record(token_id).rented_at(self._now(now))

    def nfst_info(self, token_id: int) -> NfstRecord:
        return replace(self._record(token_id))

    def available_nfsts(self, now: Optional[Timestamp] = None) -> List[NfstRecord]:
        now = self._now(now)
        return [
            self._records[t] for t in sorted(self._records)
            if self._records[t].listed and not self._records[t].rented_at(now)
        ]

    def records(self) -> List[NfstRecord]:
        return [self._records[t] for t in sorted(self._records)]

    def records_document(self) -> List[Dict[str, object]]:
        return [r.to_dict() for r in self.records()]
