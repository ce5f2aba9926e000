"""
Core value types for spectrum_ledger.

Addresses, token amounts, timestamps and the records held by the token and
rental modules. Amounts are plain Python integers counted in wei; the
helpers below keep them inside the unsigned 256-bit range.
"""

import hashlib
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .errors import InvalidAddressError, LedgerOverflowError

TOKEN_DECIMALS = 18
UNIT = 10 ** TOKEN_DECIMALS
MAX_UINT256 = 2 ** 256 - 1
MAX_TIMESTAMP = 2 ** 64 - 1

# Event names as emitted by the contract
TRANSFER_FT = "TransferFT"
TRANSFER_NFT = "TransferNFT"
UPLOAD_CHANNEL_INFO = "UploadChannelInfo"
TRANSFER_NFST = "TransferNFST"
RENT_NFST_BY_OWNER = "RentNFSTByOwner"
RENT_NFST_BY_USER = "RentNFSTByUser"

EVENT_NAMES = (
    TRANSFER_FT,
    TRANSFER_NFT,
    UPLOAD_CHANNEL_INFO,
    TRANSFER_NFST,
    RENT_NFST_BY_OWNER,
    RENT_NFST_BY_USER,
)

# Argument keys per event, in emission order
EVENT_ARG_KEYS: Dict[str, Tuple[str, ...]] = {
    TRANSFER_FT: ("_from", "_to", "_amount"),
    TRANSFER_NFT: ("_from", "_to", "_tokenId"),
    UPLOAD_CHANNEL_INFO: ("_channel", "_location"),
    TRANSFER_NFST: ("_from", "_to", "_tokenIdOfNFST"),
    RENT_NFST_BY_OWNER: ("_tokenIdOfNFST", "_price", "_duration"),
    RENT_NFST_BY_USER: ("_tokenIdOfNFST", "_renter"),
}

_HEX_ADDRESS = re.compile(r"^0x[0-9a-fA-F]{40}$")

TokenAmount = int
Timestamp = int


@dataclass(frozen=True, order=True)
class Address:
    """20-byte account identifier."""

    raw: bytes

    def __post_init__(self):
        if len(self.raw) != 20:
            raise InvalidAddressError(
                f"address must be 20 bytes, got {len(self.raw)}",
                {"length": len(self.raw)},
            )

    @classmethod
    def parse(cls, text: str) -> "Address":
        """Parse a 0x-prefixed, 40-hex-digit address in any letter case."""
        if not isinstance(text, str) or not _HEX_ADDRESS.match(text):
            raise InvalidAddressError(f"not a 20-byte hex address: {text!r}", {"text": text})
        return cls(bytes.fromhex(text[2:]))

    @classmethod
    def from_name(cls, name: str) -> "Address":
        """Deterministic address for a named scenario account."""
        return cls(hashlib.sha256(name.encode("utf-8")).digest()[:20])

    @classmethod
    def zero(cls) -> "Address":
        return ZERO_ADDRESS

    @property
    def is_zero(self) -> bool:
        return self.raw == b"\x00" * 20

    def render(self) -> str:
        return "0x" + self.raw.hex()

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"Address({self.render()})"


ZERO_ADDRESS = Address(b"\x00" * 20)


def checked_add(a: int, b: int, what: str = "amount", limit: int = MAX_UINT256) -> int:
    result = a + b
    if result > limit:
        raise LedgerOverflowError(f"{what} overflow: {a} + {b}", {"what": what})
    return result


def checked_mul(a: int, b: int, what: str = "amount", limit: int = MAX_UINT256) -> int:
    result = a * b
    if result > limit:
        raise LedgerOverflowError(f"{what} overflow: {a} * {b}", {"what": what})
    return result


def floor_units(wei: TokenAmount) -> int:
    return wei // UNIT


@dataclass(frozen=True)
class LedgerEvent:
    """One emitted contract event. ``args`` keep emission order."""

    seq: int
    at: Timestamp
    name: str
    args: Tuple[Tuple[str, str], ...]

    def arg(self, key: str) -> Optional[str]:
        for k, v in self.args:
            if k == key:
                return v
        return None

    def to_dict(self) -> Dict[str, object]:
        return {
            "seq": self.seq,
            "at": self.at,
            "event": self.name,
            "args": {k: v for k, v in self.args},
        }


@dataclass
class ChannelRecord:
    channel: str
    location: str
    upload_index: int
    bound_nft: Optional[int] = None

    @property
    def occupied(self) -> bool:
        return self.bound_nft is not None


@dataclass(frozen=True)
class SpectrumNft:
    token_id: int
    holder: Address
    channel: str
    location: str

    def to_dict(self) -> Dict[str, object]:
        return {"token_id": self.token_id, "channel": self.channel, "location": self.location}


@dataclass
class NfstRecord:
    """Rentable spectrum token. ``price``/``duration`` stay None until listed."""

    token_id: int
    owner: Address
    channel: str
    location: str
    price: Optional[TokenAmount] = None
    duration: Optional[int] = None
    user: Address = field(default=ZERO_ADDRESS)
    expire_time: Timestamp = 0

    @property
    def listed(self) -> bool:
        return self.price is not None and self.duration is not None

    def rented_at(self, now: Timestamp) -> bool:
        return not self.user.is_zero and self.expire_time >= now

    def to_dict(self) -> Dict[str, object]:
        return {
            "token_id": self.token_id,
            "owner": self.owner.render(),
            "channel": self.channel,
            "location": self.location,
            "price": None if self.price is None else str(self.price),
            "duration": self.duration,
            "user": self.user.render(),
            "expire_time": self.expire_time,
        }


def sorted_addresses(addresses) -> List[Address]:
    return sorted(addresses, key=lambda a: a.raw)
