"""
Seeded random scenario generator for spectrum_ledger.

Starting from a seed scenario (accounts, supply, channels, listed NFSTs),
the generator appends random transfers, rentals, re-listings and clock
advances. Each generated line is applied to a shadow executor first; lines
the ledger rejects are written with an ``expect CODE`` clause, so the
resulting file replays exactly and deterministically.
"""

import random
from typing import List, Optional

from .errors import LedgerError
from .models import UNIT
from .scenario_runner import ScenarioExecutor, ScenarioParser, render_decimal
from .utils.logger import get_logger

logger = get_logger()


class FuzzGenerator:
    """
    Build a random scenario on top of ``base_text``.

    Args:
        base_text: seed scenario; must run cleanly on its own
        steps: number of random commands to append
        accounts: number of accounts to draw from; missing ones are declared
        seed: ``random.Random`` seed
        max_transfer_ft: cap for the whole part of random transfer amounts
        max_advance_seconds: cap for random clock advances and listing durations
    """

    def __init__(
        self,
        base_text: str,
        steps: int,
        accounts: int = 8,
        seed: int = 0,
        max_transfer_ft: int = 3,
        max_advance_seconds: int = 86400,
    ):
        if steps < 0 or accounts < 2:
            raise ValueError("fuzzing needs steps >= 0 and at least 2 accounts")
        self.base_text = base_text
        self.steps = steps
        self.accounts = accounts
        self.rng = random.Random(seed)
        self.max_transfer_ft = max_transfer_ft
        self.max_advance_seconds = max_advance_seconds

    def generate(self) -> str:
        parser = ScenarioParser()
        lines = self.base_text.rstrip("\n").splitlines()
        commands = parser.parse("\n".join(lines))

        names = list(parser.book.addresses)
        index = 1
        while len(names) < self.accounts:
            name = f"FZ{index}"
            index += 1
            if name in parser.book.addresses:
                continue
            lines.append(f"account {name}")
            commands.extend(parser.parse_line(lines[-1], len(lines)))
            names.append(name)
        names = names[:self.accounts]

        executor = ScenarioExecutor(commands)
        report = executor.run()
        if not report.ok:
            raise ValueError(f"seed scenario does not run cleanly: {report.first_failure}")

        lines.append(f"# {self.steps} generated step(s) over {len(names)} account(s)")
        for _ in range(self.steps):
            line = self._next_line(executor, names)
            line_no = len(lines) + 1
            for command in parser.parse_line(line, line_no):
                try:
                    executor.apply(command)
                except LedgerError as e:
                    line = f"{line} expect {e.code}"
            lines.append(line)

        logger.debug(f"Generated {self.steps} fuzz step(s); {len(executor.ledger.events())} events")
        return "\n".join(lines) + "\n"

    # ------------------------------------------------------------------

    def _next_line(self, executor: ScenarioExecutor, names: List[str]) -> str:
        roll = self.rng.random()
        if roll < 0.70:
            return self._transfer(executor, names)
        if roll < 0.80:
            return self._rent(executor, names)
        if roll < 0.85:
            return self._relist(executor)
        if roll < 0.95:
            return f"advance_time {self.rng.randint(0, self.max_advance_seconds)}"
        return self._overdraw(executor, names)

    def _amount(self, balance: int) -> int:
        mode = self.rng.random()
        if mode < 0.4 and balance >= UNIT:
            return self.rng.randint(1, min(balance // UNIT, self.max_transfer_ft)) * UNIT
        if mode < 0.7:
            tenths = self.rng.randint(1, 10 * self.max_transfer_ft)
            return min(balance, tenths * UNIT // 10)
        return self.rng.randint(0, min(balance, self.max_transfer_ft * UNIT))

    def _transfer(self, executor: ScenarioExecutor, names: List[str]) -> str:
        token = executor.ledger.token
        funded = [n for n in names if token.balance_of(executor.book.addresses[n]) > 0]
        sender = self.rng.choice(funded or names)
        recipient = self.rng.choice(names)
        amount = self._amount(token.balance_of(executor.book.addresses[sender]))
        return f"transfer {sender} {recipient} {render_decimal(amount)}"

    def _overdraw(self, executor: ScenarioExecutor, names: List[str]) -> str:
        sender, recipient = self.rng.sample(names, 2)
        balance = executor.ledger.token.balance_of(executor.book.addresses[sender])
        return f"transfer {sender} {recipient} {render_decimal(balance + self.rng.randint(1, UNIT))}"

    def _pick_nfst(self, executor: ScenarioExecutor) -> Optional[int]:
        records = executor.ledger.rental.records()
        return self.rng.choice(records).token_id if records else None

    def _rent(self, executor: ScenarioExecutor, names: List[str]) -> str:
        token_id = self._pick_nfst(executor)
        if token_id is None:
            return self._transfer(executor, names)
        return f"rent_nfst {token_id} {self.rng.choice(names)}"

    def _relist(self, executor: ScenarioExecutor) -> str:
        token_id = self._pick_nfst(executor)
        if token_id is None:
            return f"advance_time {self.rng.randint(0, self.max_advance_seconds)}"
        price = self.rng.randint(1, 10) * UNIT // 20
        duration = self.rng.randint(1, self.max_advance_seconds)
        return f"list_nfst {token_id} {render_decimal(price)} {duration}"
