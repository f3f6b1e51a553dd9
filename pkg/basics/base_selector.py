import sys
from typing import List, Optional, Tuple

from modules.noise.model import NoiseModel
from modules.protocols.execution import ProtocolRunner, PurifyOutcome
from modules.protocols.registry import ProtocolSpec, protocol_registry

NO_QUALIFYING_PROTOCOL = 'no qualifying protocol'
TARGET_MET = 'target met'
NO_IMPROVEMENT = 'no improvement'
BUDGET_EXHAUSTED = 'budget exhausted'
STEP_LIMIT = 'step limit'


class SelectionStep:
    def __init__(self, protocol: ProtocolSpec, f_before: float, f_after: float, duration: float,
                 success_prob: float):
        self.protocol = protocol
        self.f_before = float(f_before)
        self.f_after = float(f_after)
        self.duration = float(duration)
        self.success_prob = float(success_prob)

    def to_dict(self) -> dict:
        return {
            'protocol': self.protocol.name, 'protocol_id': self.protocol.id,
            'f_before': self.f_before, 'f_after': self.f_after,
            'duration': self.duration, 'success_prob': self.success_prob,
        }


class SelectionResult:
    """
    :param f_in: fidelity the selection started from
    :param reason: why the loop stopped
    """

    def __init__(self, f_in: float, trace: List[SelectionStep] = None, reason: str = None):
        self.f_in = float(f_in)
        self.trace = [] if trace is None else trace
        self.reason = reason

    @property
    def p_out(self) -> List[ProtocolSpec]:
        return [step.protocol for step in self.trace]

    @property
    def f_final(self) -> float:
        return self.trace[-1].f_after if self.trace else self.f_in

    @property
    def time_used(self) -> float:
        return sum(step.duration for step in self.trace)

    @property
    def qualified(self) -> bool:
        return self.reason != NO_QUALIFYING_PROTOCOL

    def to_dict(self) -> dict:
        return {
            'f_in': self.f_in, 'f_final': self.f_final, 'time_used': self.time_used,
            'reason': self.reason, 'p_out': [spec.name for spec in self.p_out],
            'trace': [step.to_dict() for step in self.trace],
        }

    def format_trace(self) -> str:
        lines = [f'{"step":>4s}  {"protocol":<18s} {"f_before":>10s} {"f_after":>10s} '
                 f'{"success":>9s} {"duration":>11s}']
        for i, step in enumerate(self.trace, start=1):
            lines.append(
                f'{i:>4d}  {step.protocol.name:<18s} {step.f_before:>10.6f} {step.f_after:>10.6f} '
                f'{step.success_prob:>9.5f} {step.duration:>11.4e}'
            )
        lines.append(f'f_final={self.f_final:.6f} time_used={self.time_used:.4e} reason={self.reason}')
        return '\n'.join(lines)

    def __repr__(self):
        names = ', '.join(spec.name for spec in self.p_out)
        return f'SelectionResult([{names}], f_final={self.f_final:.6f}, reason={self.reason!r})'


class BaseSelector:
    """
        Base class for purification protocol selectors. Every selector runs the same budgeted loop:
        stop once the target fidelity is met, otherwise pick a protocol for the current fidelity,
        apply it if it improves the fidelity and charge its duration to the remaining budget.
        Subclasses define:
        1. *prepare*:
            the pool of protocols this selector may use for a request;
        2. *feasible*:
            the members of the pool that still fit the remaining budget;
        3. *rank*:
            the order in which feasible protocols are tried at the current fidelity.
        *choose* runs the first ranked protocol whose simulated duration fits; override it to compare
        several candidates. Protocols whose input fidelity cannot be prepared are never chosen, and a
        step where nothing else remains stops with NO_IMPROVEMENT.
    """

    def __init__(self, catalog: List[ProtocolSpec] = None, max_steps: int = 64, verbose: bool = False):
        self.catalog = protocol_registry() if catalog is None else list(catalog)
        # zero-length protocols never drain the budget
        self.max_steps = max_steps
        self.verbose = verbose

    def prepare(self, request, noise) -> List[ProtocolSpec]:
        raise NotImplementedError()

    def feasible(self, pool: List[ProtocolSpec], request, t_remain: float) -> List[ProtocolSpec]:
        raise NotImplementedError()

    def rank(self, candidates: List[ProtocolSpec], f: float) -> List[ProtocolSpec]:
        raise NotImplementedError()

    def choose(
            self, candidates: List[ProtocolSpec], f: float, t_remain: float, runner: ProtocolRunner
    ) -> Optional[Tuple[ProtocolSpec, PurifyOutcome]]:
        for spec in candidates:
            outcome = runner(f, spec)
            if outcome.reachable and outcome.duration <= t_remain:
                return spec, outcome
        return None

    def select(self, request, noise=None, runner: ProtocolRunner = None) -> SelectionResult:
        """
        :param noise: NoiseModel of request.config; built when None
        :param runner: shared memoized simulator, e.g. when several selectors score one scenario
        """
        if runner is None:
            noise = NoiseModel(request.config) if noise is None else noise
            runner = ProtocolRunner(noise, request.ep_source)
        noise = runner.noise
        result = SelectionResult(request.f_in)
        pool = self.prepare(request, noise)
        if not pool:
            result.reason = NO_QUALIFYING_PROTOCOL
            return result
        f = request.f_in
        t_remain = request.t_qos
        while True:
            if f >= request.f_out_target:
                result.reason = TARGET_MET
                break
            if len(result.trace) >= self.max_steps:
                result.reason = STEP_LIMIT
                break
            candidates = self.feasible(pool, request, t_remain) if t_remain > 0 else []
            picked = self.choose(self.rank(candidates, f), f, t_remain, runner) if candidates else None
            if picked is None:
                # choose simulated every candidate, so the runner lookups below are cached
                stuck = any(not runner(f, spec).reachable for spec in candidates)
                result.reason = NO_IMPROVEMENT if stuck else BUDGET_EXHAUSTED
                break
            spec, outcome = picked
            if outcome.f_out <= f:
                result.reason = NO_IMPROVEMENT
                break
            result.trace.append(SelectionStep(spec, f, outcome.f_out, outcome.duration, outcome.success_prob))
            if self.verbose:
                print(f'| {type(self).__name__}: {spec.name} {f:.6f} -> {outcome.f_out:.6f}', file=sys.stderr)
            f = outcome.f_out
            t_remain -= outcome.duration
        return result
