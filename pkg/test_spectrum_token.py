"""
Tests for the FT/NFT dual token: minting, channel upload, and the
whole-unit NFT rule on transfer.
"""

import pytest

from conftest import PU, SU1, SU2, SU3, SU4, supplied_ledger
from src.errors import (
    EmptyChannelIdError,
    InsufficientBalanceError,
    LedgerOverflowError,
    NoFreeChannelError,
    NotOwnerError,
    UnknownTokenError,
    ZeroAddressError,
    ZeroAmountError,
)
from src.models import MAX_UINT256, UNIT, ZERO_ADDRESS


def nft_events(ledger, start=0):
    return [
        (e.arg("_from"), e.arg("_to"), e.arg("_tokenId"))
        for e in ledger.events()[start:]
        if e.name == "TransferNFT"
    ]


class TestMintFt:
    def test_mint_to_owner(self, ledger):
        ledger.token.mint_ft(PU, PU, 10)
        assert ledger.token.balance_of(PU) == 10 * UNIT
        assert ledger.token.total_supply_ft() == 10 * UNIT
        assert ledger.token.total_supply_nft() == 10
        assert ledger.token.nft_count(PU) == 0

    def test_mint_is_additive(self, ledger):
        ledger.token.mint_ft(PU, PU, 3)
        ledger.token.mint_ft(PU, PU, 5)
        assert ledger.token.balance_of(PU) == 8 * UNIT
        assert ledger.token.total_supply_nft() == 8

    def test_mint_to_non_exempt_account_mints_no_nft(self, ledger):
        ledger.token.mint_ft(PU, SU1, 2)
        assert ledger.token.balance_of(SU1) == 2 * UNIT
        assert ledger.token.nft_count(SU1) == 0
        assert [e.name for e in ledger.events()] == ["TransferFT"]

    def test_only_owner_mints(self, ledger):
        with pytest.raises(NotOwnerError):
            ledger.token.mint_ft(SU1, SU1, 1)
        assert ledger.token.total_supply_ft() == 0

    def test_zero_recipient_rejected(self, ledger):
        with pytest.raises(ZeroAddressError):
            ledger.token.mint_ft(PU, ZERO_ADDRESS, 1)

    def test_zero_amount_rejected(self, ledger):
        with pytest.raises(ZeroAmountError):
            ledger.token.mint_ft(PU, PU, 0)

    def test_supply_overflow_rejected(self, ledger):
        with pytest.raises(LedgerOverflowError):
            ledger.token.mint_ft(PU, PU, MAX_UINT256 // UNIT + 1)
        assert ledger.events() == ()


class TestUploadChannel:
    def test_upload_registers_free_channel(self, ledger):
        assert ledger.token.upload_channel(PU, "Channel1", "Location1") is True
        assert ledger.token.channel_list() == [("Channel1", "Location1", False)]
        (event,) = ledger.events()
        assert event.name == "UploadChannelInfo"
        assert dict(event.args) == {"_channel": "Channel1", "_location": "Location1"}

    def test_duplicate_is_ignored(self, ledger):
        ledger.token.upload_channel(PU, "Channel1", "Location1")
        assert ledger.token.upload_channel(PU, "Channel1", "Location2") is False
        assert ledger.token.channel_list() == [("Channel1", "Location1", False)]
        assert len(ledger.events()) == 1

    def test_upload_order_is_kept(self, ledger):
        for i in (3, 1, 2):
            ledger.token.upload_channel(PU, f"Channel{i}", f"Location{i}")
        assert [c[0] for c in ledger.token.channel_list()] == ["Channel3", "Channel1", "Channel2"]

    def test_empty_channel_id_rejected(self, ledger):
        with pytest.raises(EmptyChannelIdError):
            ledger.token.upload_channel(PU, "", "Location1")

    def test_only_owner_uploads(self, ledger):
        with pytest.raises(NotOwnerError):
            ledger.token.upload_channel(SU1, "Channel1", "Location1")

    def test_channels_match_supply(self, ledger):
        ledger.token.mint_ft(PU, PU, 2)
        ledger.token.upload_channel(PU, "Channel1", "Location1")
        assert not ledger.token.channels_match_supply()
        ledger.token.upload_channel(PU, "Channel2", "Location2")
        assert ledger.token.channels_match_supply()


class TestTransfer:
    def test_owner_sends_one_whole_token(self, funded_ledger):
        start = len(funded_ledger.events())
        funded_ledger.token.transfer(PU, SU1, UNIT)

        token = funded_ledger.token
        assert token.balance_of(PU) == 7 * UNIT
        assert token.balance_of(SU1) == UNIT
        assert token.nft_count(PU) == 0
        assert token.nft_count(SU1) == 1
        assert token.channel_of_nft(1) == "Channel1"
        assert token.owner_of_nft(1) == SU1
        assert [e.name for e in funded_ledger.events()[start:]] == ["TransferFT", "TransferNFT"]
        assert nft_events(funded_ledger, start) == [(ZERO_ADDRESS.render(), SU1.render(), "1")]

    def test_fraction_moves_no_nft(self, funded_ledger):
        start = len(funded_ledger.events())
        funded_ledger.token.transfer(PU, SU2, UNIT // 10)

        assert funded_ledger.token.balance_of(PU) == 79 * UNIT // 10
        assert funded_ledger.token.balance_of(SU2) == UNIT // 10
        assert funded_ledger.token.nft_count(SU2) == 0
        assert [e.name for e in funded_ledger.events()[start:]] == ["TransferFT"]

    def test_user_transfer_burns_highest_id_then_mints(self, su3_ledger):
        start = len(su3_ledger.events())
        su3_ledger.token.transfer(SU3, SU4, UNIT)

        token = su3_ledger.token
        assert token.balance_of(SU3) == UNIT
        assert token.balance_of(SU4) == UNIT
        assert [n.token_id for n in token.nfts_of(SU3)] == [1]
        assert [n.token_id for n in token.nfts_of(SU4)] == [3]
        assert token.channel_of_nft(3) == "Channel2"
        assert nft_events(su3_ledger, start) == [
            (SU3.render(), ZERO_ADDRESS.render(), "2"),
            (ZERO_ADDRESS.render(), SU4.render(), "3"),
        ]
        with pytest.raises(UnknownTokenError):
            token.owner_of_nft(2)

    def test_lowest_free_channel_is_chosen(self):
        ledger = supplied_ledger(3)
        ledger.token.transfer(PU, SU1, UNIT)
        ledger.token.transfer(PU, SU2, UNIT)
        ledger.token.transfer(SU2, PU, UNIT)

        assert ledger.token.channel_list() == [
            ("Channel1", "Location1", True),
            ("Channel2", "Location2", False),
            ("Channel3", "Location3", False),
        ]
        ledger.token.transfer(PU, SU3, UNIT)
        assert ledger.token.channel_of_nft(3) == "Channel2"

    def test_token_ids_are_never_reused(self):
        ledger = supplied_ledger(2)
        ledger.token.transfer(PU, SU1, UNIT)
        ledger.token.transfer(SU1, PU, UNIT)
        ledger.token.transfer(PU, SU1, UNIT)
        assert [n.token_id for n in ledger.token.live_nfts()] == [2]

    def test_fraction_crossing_a_whole_unit(self, funded_ledger):
        funded_ledger.token.transfer(PU, SU1, UNIT // 2)
        funded_ledger.token.transfer(PU, SU1, UNIT // 2)
        assert funded_ledger.token.nft_count(SU1) == 1
        funded_ledger.token.transfer(SU1, SU2, 1)
        assert funded_ledger.token.nft_count(SU1) == 0
        assert funded_ledger.token.nft_count(SU2) == 0

    def test_exempt_recipient_only_burns(self, funded_ledger):
        funded_ledger.token.transfer(PU, SU1, 2 * UNIT)
        start = len(funded_ledger.events())
        funded_ledger.token.transfer(SU1, PU, UNIT)
        assert funded_ledger.token.nft_count(PU) == 0
        assert nft_events(funded_ledger, start) == [(SU1.render(), ZERO_ADDRESS.render(), "2")]

    def test_self_transfer_changes_nothing(self, su3_ledger):
        before = su3_ledger.snapshot()
        start = len(su3_ledger.events())
        su3_ledger.token.transfer(SU3, SU3, UNIT)
        assert su3_ledger.snapshot() == before
        assert [e.name for e in su3_ledger.events()[start:]] == ["TransferFT"]

    def test_zero_amount_transfer_emits_only_ft_event(self, su3_ledger):
        before = su3_ledger.snapshot()
        start = len(su3_ledger.events())
        su3_ledger.token.transfer(SU3, SU1, 0)
        assert su3_ledger.snapshot() == before
        assert [e.name for e in su3_ledger.events()[start:]] == ["TransferFT"]

    def test_insufficient_balance_is_atomic(self, su3_ledger):
        before = su3_ledger.render_snapshot()
        with pytest.raises(InsufficientBalanceError):
            su3_ledger.token.transfer(SU3, SU4, 2 * UNIT + 1)
        assert su3_ledger.render_snapshot() == before

    def test_no_free_channel_is_atomic(self):
        ledger = supplied_ledger(3, channels=1)
        before = ledger.render_snapshot()
        with pytest.raises(NoFreeChannelError):
            ledger.token.transfer(PU, SU1, 2 * UNIT)
        assert ledger.render_snapshot() == before

        ledger.token.transfer(PU, SU1, UNIT)
        assert ledger.token.nft_count(SU1) == 1

    def test_freed_channel_backs_recipient_in_same_transfer(self):
        ledger = supplied_ledger(2, channels=1)
        ledger.token.transfer(PU, SU1, UNIT)
        ledger.token.transfer(SU1, SU2, UNIT)
        assert ledger.token.channel_of_nft(2) == "Channel1"
        assert ledger.token.nft_count(SU1) == 0

    def test_zero_address_parties_rejected(self, funded_ledger):
        with pytest.raises(ZeroAddressError):
            funded_ledger.token.transfer(PU, ZERO_ADDRESS, UNIT)
        with pytest.raises(ZeroAddressError):
            funded_ledger.token.transfer(ZERO_ADDRESS, PU, 0)

    def test_out_of_range_amount_rejected(self, funded_ledger):
        with pytest.raises(LedgerOverflowError):
            funded_ledger.token.transfer(PU, SU1, -1)
        with pytest.raises(LedgerOverflowError):
            funded_ledger.token.transfer(PU, SU1, MAX_UINT256 + 1)

    def test_zero_balances_leave_the_holder_list(self, funded_ledger):
        funded_ledger.token.transfer(PU, SU1, UNIT)
        funded_ledger.token.transfer(SU1, PU, UNIT)
        assert SU1 not in funded_ledger.token.holders()
        assert SU1.render() not in funded_ledger.snapshot()["ft_balances"]


class TestQueries:
    def test_exempt_set_is_the_owner(self, ledger):
        assert ledger.token.exempt_accounts() == [PU]
        assert not ledger.token.is_exempt(SU1)

    def test_unknown_nft(self, funded_ledger):
        with pytest.raises(UnknownTokenError):
            funded_ledger.token.channel_of_nft(1)

    def test_nfts_of_in_ascending_id_order(self, funded_ledger):
        funded_ledger.token.transfer(PU, SU1, 3 * UNIT)
        assert [n.token_id for n in funded_ledger.token.nfts_of(SU1)] == [1, 2, 3]
        assert funded_ledger.token.nfts_of(SU2) == []
