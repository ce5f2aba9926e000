"""
ERC404-style spectrum token for spectrum_ledger.

Fungible balances are kept in wei. Whenever a transfer changes the number
of whole tokens a non-exempt account holds, NFTs are burned from the sender
and minted to the recipient so that every such account holds exactly
floor(balance / UNIT) NFTs. Each minted NFT is bound to the
lowest-upload-index channel not already backing a live NFT.
"""

import heapq
from typing import TYPE_CHECKING, Dict, List, Optional, Tuple

from .errors import (
    EmptyChannelIdError,
    InsufficientBalanceError,
    LedgerOverflowError,
    NoFreeChannelError,
    UnknownTokenError,
    ZeroAddressError,
    ZeroAmountError,
)
from .models import (
    MAX_UINT256,
    TRANSFER_FT,
    TRANSFER_NFT,
    UNIT,
    UPLOAD_CHANNEL_INFO,
    ZERO_ADDRESS,
    Address,
    ChannelRecord,
    SpectrumNft,
    TokenAmount,
    checked_add,
    checked_mul,
    sorted_addresses,
    floor_units,
)
from .utils.logger import get_logger

if TYPE_CHECKING:
    from .ledger import Ledger

logger = get_logger()


def _require_non_zero(address: Address, role: str) -> None:
    if address.is_zero:
        raise ZeroAddressError(f"{role} cannot be the zero address", {"role": role})


class SpectrumToken:
    """
    FT/NFT dual token plus the uploaded channel registry.

    The exempt set holds the contract owner only; exempt accounts never
    receive or lose NFTs when FT moves.
    """

    def __init__(self, ledger: "Ledger"):
        self._ledger = ledger
        self._balances: Dict[Address, TokenAmount] = {}
        self._exempt = {ledger.owner}
        self._total_supply_ft: TokenAmount = 0
        self._total_supply_nft = 0

        self._nfts: Dict[int, SpectrumNft] = {}
        # token ids per holder, ascending (ids are allocated monotonically)
        self._holdings: Dict[Address, List[int]] = {}

        self._channels: List[ChannelRecord] = []
        self._channel_by_id: Dict[str, ChannelRecord] = {}
        self._free_channels: List[int] = []  # min-heap of upload indexes

    # ------------------------------------------------------------------
    # Mutations

    def mint_ft(self, caller: Address, recipient: Address, whole_units: int) -> None:
        """
        Credit ``whole_units`` FT to ``recipient`` and raise both supplies.

        No NFTs are minted here, even for a non-exempt recipient.
        """
        self._ledger.require_owner(caller)
        _require_non_zero(recipient, "recipient")
        if not isinstance(whole_units, int) or whole_units < 1:
            raise ZeroAmountError(f"mint amount must be at least 1 FT, got {whole_units!r}")

        amount_wei = checked_mul(whole_units, UNIT)
        new_total_ft = checked_add(self._total_supply_ft, amount_wei, what="totalSupply_FT")
        new_total_nft = checked_add(self._total_supply_nft, whole_units, what="totalSupply_NFT")
        new_balance = checked_add(self.balance_of(recipient), amount_wei)

        args = {"caller": caller.render(), "recipient": recipient.render(), "whole_units": whole_units}
        with self._ledger.command("mint_ft", args):
            self._balances[recipient] = new_balance
            self._total_supply_ft = new_total_ft
            self._total_supply_nft = new_total_nft
            self._ledger.emit(TRANSFER_FT, [
                ("_from", ZERO_ADDRESS.render()),
                ("_to", recipient.render()),
                ("_amount", str(amount_wei)),
            ])

        logger.debug(f"Minted {whole_units} FT to {recipient.render()}")

    def upload_channel(self, caller: Address, channel: str, location: str) -> bool:
        """Register a channel. Returns False, changing nothing, for a duplicate."""
        self._ledger.require_owner(caller)
        if not isinstance(channel, str) or not channel:
            raise EmptyChannelIdError("channel id must be a non-empty string")

        if channel in self._channel_by_id:
            logger.debug(f"Channel {channel} already uploaded; ignoring")
            return False

        args = {"caller": caller.render(), "channel": channel, "location": location}
        with self._ledger.command("upload_channel", args):
            record = ChannelRecord(channel=channel, location=location, upload_index=len(self._channels))
            self._channels.append(record)
            self._channel_by_id[channel] = record
            heapq.heappush(self._free_channels, record.upload_index)
            self._ledger.emit(UPLOAD_CHANNEL_INFO, [("_channel", channel), ("_location", location)])
        return True

    def transfer(self, sender: Address, recipient: Address, amount: TokenAmount) -> None:
        """
        Move ``amount`` wei and apply the whole-unit NFT mint/burn rule.

        Burns (highest token id first) happen before mints, so a channel
        freed by the sender can back the recipient's new NFT.
        """
        _require_non_zero(sender, "sender")
        _require_non_zero(recipient, "recipient")
        if not isinstance(amount, int) or amount < 0 or amount > MAX_UINT256:
            raise LedgerOverflowError(f"transfer amount out of range: {amount!r}")

        old_sender = self.balance_of(sender)
        if old_sender < amount:
            raise InsufficientBalanceError(
                f"{sender.render()} holds {old_sender} wei, needs {amount}",
                {"balance": old_sender, "amount": amount},
            )

        if sender == recipient:
            burn_n = mint_n = 0
            new_sender = new_recipient = old_sender
        else:
            old_recipient = self.balance_of(recipient)
            new_sender = old_sender - amount
            new_recipient = checked_add(old_recipient, amount)
            burn_n = 0 if self.is_exempt(sender) else floor_units(old_sender) - floor_units(new_sender)
            mint_n = 0 if self.is_exempt(recipient) else floor_units(new_recipient) - floor_units(old_recipient)

        if mint_n > len(self._free_channels) + burn_n:
            raise NoFreeChannelError(
                f"need {mint_n} free channel(s), have {len(self._free_channels) + burn_n}",
                {"mint": mint_n, "free": len(self._free_channels), "burn": burn_n},
            )

        args = {"sender": sender.render(), "recipient": recipient.render(), "amount": str(amount)}
        with self._ledger.command("transfer", args):
            self._set_balance(sender, new_sender)
            self._set_balance(recipient, new_recipient)
            self._ledger.emit(TRANSFER_FT, [
                ("_from", sender.render()),
                ("_to", recipient.render()),
                ("_amount", str(amount)),
            ])
            for _ in range(burn_n):
                self._burn_one(sender)
            for _ in range(mint_n):
                self._mint_one(recipient)

        if burn_n or mint_n:
            logger.debug(
                f"Transfer {sender.render()} -> {recipient.render()}: burned {burn_n}, minted {mint_n}"
            )

    def _set_balance(self, address: Address, value: TokenAmount) -> None:
        if value:
            self._balances[address] = value
        else:
            self._balances.pop(address, None)

    def _burn_one(self, holder: Address) -> None:
        held = self._holdings[holder]
        token_id = held.pop()
        if not held:
            del self._holdings[holder]

        nft = self._nfts.pop(token_id)
        record = self._channel_by_id[nft.channel]
        record.bound_nft = None
        heapq.heappush(self._free_channels, record.upload_index)

        self._ledger.emit(TRANSFER_NFT, [
            ("_from", holder.render()),
            ("_to", ZERO_ADDRESS.render()),
            ("_tokenId", str(token_id)),
        ])

    def _mint_one(self, holder: Address) -> None:
        record = self._channels[heapq.heappop(self._free_channels)]
        token_id = self._ledger.allocate_token_id()
        record.bound_nft = token_id

        self._nfts[token_id] = SpectrumNft(
            token_id=token_id, holder=holder, channel=record.channel, location=record.location
        )
        self._holdings.setdefault(holder, []).append(token_id)

        self._ledger.emit(TRANSFER_NFT, [
            ("_from", ZERO_ADDRESS.render()),
            ("_to", holder.render()),
            ("_tokenId", str(token_id)),
        ])

    # ------------------------------------------------------------------
    # Queries

    def balance_of(self, address: Address) -> TokenAmount:
        return self._balances.get(address, 0)

    def nfts_of(self, address: Address) -> List[SpectrumNft]:
        return [self._nfts[token_id] for token_id in self._holdings.get(address, [])]

    def nft_count(self, address: Address) -> int:
        return len(self._holdings.get(address, []))

    def channel_list(self) -> List[Tuple[str, str, bool]]:
        return [(r.channel, r.location, r.occupied) for r in self._channels]

    def channel_records(self) -> List[ChannelRecord]:
        return list(self._channels)

    def has_channel(self, channel: str) -> bool:
        return channel in self._channel_by_id

    def is_exempt(self, address: Address) -> bool:
        return address in self._exempt

    def exempt_accounts(self) -> List[Address]:
        return sorted_addresses(self._exempt)

    def total_supply_ft(self) -> TokenAmount:
        return self._total_supply_ft

    def total_supply_nft(self) -> int:
        return self._total_supply_nft

    def channels_match_supply(self) -> bool:
        return len(self._channels) == self._total_supply_nft

    def live_nfts(self) -> List[SpectrumNft]:
        return [self._nfts[token_id] for token_id in sorted(self._nfts)]

    def holders(self) -> List[Address]:
        return sorted_addresses(self._balances)

    def _live_nft(self, token_id: int) -> SpectrumNft:
        nft: Optional[SpectrumNft] = self._nfts.get(token_id)
        if nft is None:
            raise UnknownTokenError(f"no live NFT with id {token_id}", {"token_id": token_id})
        return nft

    def owner_of_nft(self, token_id: int) -> Address:
        return self._live_nft(token_id).holder

    def channel_of_nft(self, token_id: int) -> str:
        return self._live_nft(token_id).channel

    # ------------------------------------------------------------------
    # Snapshot fragments

    def balances_document(self) -> Dict[str, str]:
        return {a.render(): str(self._balances[a]) for a in sorted_addresses(self._balances)}

    def holdings_document(self) -> Dict[str, List[Dict[str, object]]]:
        return {
            a.render(): [self._nfts[t].to_dict() for t in self._holdings[a]]
            for a in sorted_addresses(self._holdings)
        }

    def channels_document(self) -> List[Dict[str, object]]:
        return [
            {"channel": r.channel, "location": r.location, "occupied": r.occupied}
            for r in self._channels
        ]
