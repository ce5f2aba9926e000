"""
Scenario DSL for spectrum_ledger.

A scenario is a line-oriented script of ledger commands and assertions.
It is parsed into ScenarioCommand objects, executed against one fresh
ledger, and summarized in a RunReport. Named accounts map to deterministic
addresses, so the same file always produces the same events and state.

Example::

    account PU 0x0aa7652b45d957b9d2de60afbbd90b2dad3d1f60
    mint_ft PU 8
    upload_channel Channel1 Location1
    transfer PU SU1 1.0
    assert nft_count SU1 1
"""

import json
import re
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

from .errors import (
    InvariantViolationError,
    LedgerError,
    MalformedAmountError,
    ParseError,
    error_codes,
)
from .invariants import InvariantChecker
from .ledger import Ledger, render_document
from .models import ZERO_ADDRESS, Address, LedgerEvent
from .utils.logger import get_logger
from .utils.text_utils import TextUtils

logger = get_logger()

VERBS = (
    "account",
    "mint_ft",
    "upload_channel",
    "transfer",
    "mint_nfst",
    "list_nfst",
    "rent_nfst",
    "advance_time",
    "assert",
    "dump",
)

# Verbs that change state and therefore accept an ``expect CODE`` clause
MUTATING_VERBS = {"mint_ft", "upload_channel", "transfer", "mint_nfst", "list_nfst", "rent_nfst", "advance_time"}

# Verbs whose caller defaults to the ledger owner and may be set with ``as NAME``
OWNER_VERBS = {"mint_ft", "upload_channel", "mint_nfst", "list_nfst"}

ASSERT_ARITY = {
    "balance": 2,
    "nft_count": 2,
    "user_of": 2,
    "channel_of_nft": 2,
    "available_count": 1,
    "expire_time": 2,
    "total_supply_ft": 1,
    "total_supply_nft": 1,
    "channels_match_supply": 0,
}

_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_UINT = re.compile(r"^[0-9]+$")


def parse_amount(text: str) -> int:
    """Exact wei value of a decimal FT string."""
    return TextUtils.parse_amount(text)


def render_decimal(wei: int) -> str:
    return TextUtils.render_decimal(wei)


@dataclass
class ScenarioCommand:
    line_no: int
    verb: str
    args: Dict[str, Any] = field(default_factory=dict)
    expect: Optional[str] = None
    source: str = ""


class AccountBook:
    """Name → address mapping; the first account named is the ledger owner."""

    def __init__(self):
        self.addresses: Dict[str, Address] = {}

    @property
    def owner_name(self) -> Optional[str]:
        return next(iter(self.addresses), None)

    def declare(self, name: str, address: Address, line_no: int) -> None:
        known = self.addresses.get(name)
        if known is not None and known != address:
            raise ParseError(line_no, f"account {name} already bound to {known.render()}")
        if address.is_zero:
            raise ParseError(line_no, "the zero address cannot be a named account")
        self.addresses[name] = address

    def name_of(self, address: Address) -> str:
        if address.is_zero:
            return "zero"
        for name, known in self.addresses.items():
            if known == address:
                return name
        return address.render()


class ScenarioParser:
    """
    Stateful line parser.

    The first reference to an undeclared account name inserts an implicit
    ``account`` command so that executors see every account before use.
    """

    def __init__(self):
        self.book = AccountBook()

    def parse(self, text: str) -> List[ScenarioCommand]:
        commands: List[ScenarioCommand] = []
        for line_no, line in enumerate(text.splitlines(), start=1):
            commands.extend(self.parse_line(line, line_no))
        if self.book.owner_name is None:
            line_no = commands[0].line_no if commands else 1
            raise ParseError(line_no, "scenario names no accounts, so it has no ledger owner")
        return commands

    def parse_line(self, line: str, line_no: int) -> List[ScenarioCommand]:
        try:
            words = TextUtils.tokenize_line(line)
        except ValueError as e:
            raise ParseError(line_no, str(e))
        if not words:
            return []

        verb, rest = words[0], words[1:]
        if verb not in VERBS:
            raise ParseError(line_no, f"unknown command {verb!r}")

        implicit: List[ScenarioCommand] = []
        command = ScenarioCommand(line_no=line_no, verb=verb, source=line.strip())

        if verb in MUTATING_VERBS and len(rest) >= 2 and rest[-2] == "expect":
            code = rest[-1]
            if code not in error_codes():
                raise ParseError(line_no, f"unknown error code {code!r}")
            command.expect = code
            rest = rest[:-2]

        if verb in OWNER_VERBS:
            command.args["caller"] = None
            if len(rest) >= 2 and rest[-2] == "as":
                command.args["caller"] = self._account(rest[-1], line_no, implicit)
                rest = rest[:-2]

        try:
            getattr(self, f"_parse_{verb}")(command, rest, implicit)
        except MalformedAmountError as e:
            raise ParseError(line_no, str(e))
        return implicit + [command]

    # ------------------------------------------------------------------
    # Argument helpers

    def _arity(self, command: ScenarioCommand, rest: List[str], *counts: int) -> None:
        if len(rest) not in counts:
            wanted = " or ".join(str(c) for c in counts)
            raise ParseError(command.line_no, f"{command.verb} takes {wanted} argument(s), got {len(rest)}")

    def _uint(self, text: str, line_no: int, what: str) -> int:
        if not _UINT.match(text):
            raise ParseError(line_no, f"{what} must be an unsigned integer, got {text!r}")
        return int(text)

    def _account(self, text: str, line_no: int, implicit: List[ScenarioCommand]) -> Address:
        if text == "zero":
            return ZERO_ADDRESS
        if text.startswith("0x"):
            try:
                address = Address.parse(text)
            except LedgerError as e:
                raise ParseError(line_no, e.message)
            if address.is_zero:
                return address
            name = address.render()
        elif _NAME.match(text):
            name = text
            address = self.book.addresses.get(name) or Address.from_name(name)
        else:
            raise ParseError(line_no, f"invalid account reference {text!r}")

        if name not in self.book.addresses:
            self.book.declare(name, address, line_no)
            implicit.append(ScenarioCommand(
                line_no=line_no, verb="account", args={"name": name, "address": address}, source=""
            ))
        return address

    # ------------------------------------------------------------------
    # Per-verb parsers

    def _parse_account(self, command, rest, implicit):
        self._arity(command, rest, 1, 2)
        name = rest[0]
        if not _NAME.match(name) or name == "zero":
            raise ParseError(command.line_no, f"invalid account name {name!r}")
        if len(rest) == 2:
            try:
                address = Address.parse(rest[1])
            except LedgerError as e:
                raise ParseError(command.line_no, e.message)
        else:
            address = self.book.addresses.get(name) or Address.from_name(name)
        self.book.declare(name, address, command.line_no)
        command.args.update(name=name, address=address)

    def _parse_mint_ft(self, command, rest, implicit):
        self._arity(command, rest, 2)
        command.args["recipient"] = self._account(rest[0], command.line_no, implicit)
        command.args["whole_units"] = self._uint(rest[1], command.line_no, "whole units")

    def _parse_upload_channel(self, command, rest, implicit):
        self._arity(command, rest, 2)
        command.args.update(channel=rest[0], location=rest[1])

    def _parse_transfer(self, command, rest, implicit):
        self._arity(command, rest, 3)
        command.args["sender"] = self._account(rest[0], command.line_no, implicit)
        command.args["recipient"] = self._account(rest[1], command.line_no, implicit)
        command.args["amount"] = parse_amount(rest[2])

    def _parse_mint_nfst(self, command, rest, implicit):
        self._arity(command, rest, 2)
        command.args.update(channel=rest[0], location=rest[1])

    def _parse_list_nfst(self, command, rest, implicit):
        self._arity(command, rest, 3)
        command.args["token_id"] = self._uint(rest[0], command.line_no, "token id")
        command.args["price"] = parse_amount(rest[1])
        command.args["duration"] = self._uint(rest[2], command.line_no, "duration")

    def _parse_rent_nfst(self, command, rest, implicit):
        self._arity(command, rest, 2)
        command.args["token_id"] = self._uint(rest[0], command.line_no, "token id")
        command.args["renter"] = self._account(rest[1], command.line_no, implicit)

    def _parse_advance_time(self, command, rest, implicit):
        self._arity(command, rest, 1)
        command.args["delta"] = self._uint(rest[0], command.line_no, "seconds")

    def _parse_dump(self, command, rest, implicit):
        self._arity(command, rest, 0, 1)
        command.args["label"] = rest[0] if rest else f"line{command.line_no}"

    def _parse_assert(self, command, rest, implicit):
        if not rest or rest[0] not in ASSERT_ARITY:
            raise ParseError(command.line_no, f"unknown assertion {rest[0] if rest else ''!r}")
        kind, params = rest[0], rest[1:]
        if len(params) != ASSERT_ARITY[kind]:
            raise ParseError(command.line_no, f"assert {kind} takes {ASSERT_ARITY[kind]} argument(s)")

        line_no = command.line_no
        command.args["kind"] = kind
        if kind == "balance":
            command.args["account"] = self._account(params[0], line_no, implicit)
            command.args["expected"] = parse_amount(params[1])
        elif kind == "nft_count":
            command.args["account"] = self._account(params[0], line_no, implicit)
            command.args["expected"] = self._uint(params[1], line_no, "count")
        elif kind == "user_of":
            command.args["token_id"] = self._uint(params[0], line_no, "token id")
            command.args["expected"] = self._account(params[1], line_no, implicit)
        elif kind == "channel_of_nft":
            command.args["token_id"] = self._uint(params[0], line_no, "token id")
            command.args["expected"] = params[1]
        elif kind == "expire_time":
            command.args["token_id"] = self._uint(params[0], line_no, "token id")
            command.args["expected"] = self._uint(params[1], line_no, "timestamp")
        elif kind == "total_supply_ft":
            command.args["expected"] = parse_amount(params[0])
        elif kind in ("available_count", "total_supply_nft"):
            command.args["expected"] = self._uint(params[0], line_no, "count")
        else:
            command.args["expected"] = True


def parse_scenario(text: str) -> List[ScenarioCommand]:
    return ScenarioParser().parse(text)


@dataclass
class AssertionResult:
    line_no: int
    kind: str
    passed: bool
    expected: str
    actual: str

    def to_dict(self) -> Dict[str, Any]:
        return {
            "line_no": self.line_no,
            "kind": self.kind,
            "passed": self.passed,
            "expected": self.expected,
            "actual": self.actual,
        }


@dataclass
class RunReport:
    commands_executed: int = 0
    assertions: List[AssertionResult] = field(default_factory=list)
    dumps: List[Dict[str, Any]] = field(default_factory=list)
    final_snapshot: Dict[str, Any] = field(default_factory=dict)
    events: List[LedgerEvent] = field(default_factory=list)
    first_failure: Optional[Dict[str, Any]] = None

    @property
    def ok(self) -> bool:
        return self.first_failure is None

    @property
    def failed_assertions(self) -> List[AssertionResult]:
        return [a for a in self.assertions if not a.passed]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ok": self.ok,
            "commands_executed": self.commands_executed,
            "first_failure": self.first_failure,
            "assertions": [a.to_dict() for a in self.assertions],
            "dumps": self.dumps,
            "events": [e.to_dict() for e in self.events],
            "final_snapshot": self.final_snapshot,
        }

    def render(self) -> str:
        return render_document(self.to_dict())


class ScenarioExecutor:
    """Runs parsed commands against one fresh ledger."""

    def __init__(self, commands: Sequence[ScenarioCommand], check_invariants: bool = False):
        self.commands = list(commands)
        self.check_invariants = check_invariants

        self.book = AccountBook()
        owner = None
        for command in self.commands:
            if command.verb == "account":
                owner = command.args["address"]
                break
        if owner is None:
            raise ValueError("scenario declares no account to own the ledger")

        self.ledger = Ledger(owner)
        self.checker = InvariantChecker(self.ledger)
        self.report = RunReport()

    def _fail(self, command: ScenarioCommand, code: str, reason: str) -> None:
        if self.report.first_failure is None:
            self.report.first_failure = {"line_no": command.line_no, "code": code, "reason": reason}
            logger.error(f"Line {command.line_no}: {reason}")

    def apply(self, command: ScenarioCommand) -> None:
        """Execute one command; LedgerErrors propagate to the caller."""
        args = command.args
        ledger = self.ledger
        caller = args.get("caller") or ledger.owner

        if command.verb == "account":
            self.book.declare(args["name"], args["address"], command.line_no)
        elif command.verb == "mint_ft":
            ledger.token.mint_ft(caller, args["recipient"], args["whole_units"])
        elif command.verb == "upload_channel":
            ledger.token.upload_channel(caller, args["channel"], args["location"])
        elif command.verb == "transfer":
            ledger.token.transfer(args["sender"], args["recipient"], args["amount"])
        elif command.verb == "mint_nfst":
            ledger.rental.mint_nfst(caller, args["channel"], args["location"])
        elif command.verb == "list_nfst":
            ledger.rental.list_nfst(caller, args["token_id"], args["price"], args["duration"])
        elif command.verb == "rent_nfst":
            ledger.rental.rent_nfst_by_user(args["token_id"], args["renter"])
        elif command.verb == "advance_time":
            ledger.advance_time(args["delta"])
        elif command.verb == "dump":
            self.report.dumps.append({
                "line_no": command.line_no,
                "label": args["label"],
                "state": ledger.snapshot(),
            })
        elif command.verb == "assert":
            self.report.assertions.append(self._evaluate(command))

    def _evaluate(self, command: ScenarioCommand) -> AssertionResult:
        args = command.args
        kind = args["kind"]
        token, rental = self.ledger.token, self.ledger.rental

        if kind == "balance":
            expected = render_decimal(args["expected"])
            actual = render_decimal(token.balance_of(args["account"]))
        elif kind == "nft_count":
            expected, actual = str(args["expected"]), str(token.nft_count(args["account"]))
        elif kind == "user_of":
            expected = self.book.name_of(args["expected"])
            actual = self.book.name_of(rental.user_of(args["token_id"]))
        elif kind == "channel_of_nft":
            expected = args["expected"]
            live = {nft.token_id: nft.channel for nft in token.live_nfts()}
            actual = live.get(args["token_id"], "<no live NFT>")
        elif kind == "available_count":
            expected, actual = str(args["expected"]), str(len(rental.available_nfsts()))
        elif kind == "expire_time":
            expected, actual = str(args["expected"]), str(rental.expire_time_of(args["token_id"]))
        elif kind == "total_supply_ft":
            expected = render_decimal(args["expected"])
            actual = render_decimal(token.total_supply_ft())
        elif kind == "total_supply_nft":
            expected, actual = str(args["expected"]), str(token.total_supply_nft())
        else:
            expected, actual = "true", str(token.channels_match_supply()).lower()

        result = AssertionResult(command.line_no, kind, expected == actual, expected, actual)
        if result.passed:
            logger.debug(f"Line {command.line_no}: assert {kind} ok ({actual})")
        else:
            self._fail(command, "AssertionFailed", f"assert {kind}: expected {expected}, got {actual}")
        return result

    def run(self) -> RunReport:
        for command in self.commands:
            try:
                self.apply(command)
                if command.expect is not None:
                    self._fail(command, "ExpectedError", f"expected {command.expect}, command succeeded")
                    break
            except LedgerError as e:
                if command.expect != e.code:
                    self._fail(command, e.code, str(e))
                    break
                logger.debug(f"Line {command.line_no}: expected {e.code} raised")
            self.report.commands_executed += 1

            if self.check_invariants:
                try:
                    self.checker.check()
                except InvariantViolationError as e:
                    self._fail(command, e.code, str(e))
                    break

        self.report.final_snapshot = self.ledger.snapshot()
        self.report.events = list(self.ledger.events())
        return self.report


def execute(commands: Sequence[ScenarioCommand], check_invariants: bool = False) -> RunReport:
    return ScenarioExecutor(commands, check_invariants=check_invariants).run()


def render_events(events: Sequence[LedgerEvent]) -> str:
    """One JSON record per event: the event name and its underscore-keyed args."""
    lines = [json.dumps({"event": e.name, "args": dict(e.args)}, ensure_ascii=False) for e in events]
    return "".join(line + "\n" for line in lines)
