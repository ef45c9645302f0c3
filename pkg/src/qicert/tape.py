"""Compilation of expression trees into flat instruction tapes.

Each instruction writes one register; operands refer to earlier registers.
Integer powers are expanded into multiplication chains at compile time
(binary exponentiation), so they stay valid for any base; only a genuinely
real exponent survives as a POWR instruction, which requires a strictly
positive base at run time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import expr as E

OP_CONST = 0
OP_VAR = 1
OP_NEG = 2
OP_ADD = 3
OP_SUB = 4
OP_MUL = 5
OP_DIV = 6
OP_EXP = 7
OP_LOG = 8
OP_POWR = 9
OP_ABS = 10
OP_MIN = 11
OP_MAX = 12

_KINK_OPS = (OP_ABS, OP_MIN, OP_MAX)

# integer exponents beyond this magnitude fall back to POWR (positive base)
_MAX_INT_POW = 64


@dataclass(frozen=True)
class Tape:
    ops: np.ndarray      # int64, opcode per instruction
    arg1: np.ndarray     # int64, first operand register (or -1)
    arg2: np.ndarray     # int64, second operand register (or -1)
    consts: np.ndarray   # float64, literal / exponent per instruction
    out: int             # register holding the root result
    has_kinks: bool

    def __len__(self):
        return len(self.ops)


class _Builder:
    def __init__(self):
        self.ops = []
        self.arg1 = []
        self.arg2 = []
        self.consts = []

    def emit(self, op: int, a: int = -1, b: int = -1, c: float = 0.0) -> int:
        self.ops.append(op)
        self.arg1.append(a)
        self.arg2.append(b)
        self.consts.append(c)
        return len(self.ops) - 1

    def int_power(self, base_reg: int, k: int) -> int:
        if k == 0:
            return self.emit(OP_CONST, c=1.0)
        if k < 0:
            one = self.emit(OP_CONST, c=1.0)
            pos = self.int_power(base_reg, -k)
            return self.emit(OP_DIV, one, pos)
        # binary exponentiation over truncated series (exact)
        result = -1
        square = base_reg
        while k:
            if k & 1:
                result = square if result < 0 else self.emit(OP_MUL, result, square)
            k >>= 1
            if k:
                square = self.emit(OP_MUL, square, square)
        return result

    def walk(self, node: E.Node) -> int:
        if isinstance(node, E.Const):
            return self.emit(OP_CONST, c=node.value)
        if isinstance(node, E.Var):
            return self.emit(OP_VAR)
        if isinstance(node, E.Neg):
            return self.emit(OP_NEG, self.walk(node.arg))
        if isinstance(node, E.Add):
            return self.emit(OP_ADD, self.walk(node.left), self.walk(node.right))
        if isinstance(node, E.Sub):
            return self.emit(OP_SUB, self.walk(node.left), self.walk(node.right))
        if isinstance(node, E.Mul):
            return self.emit(OP_MUL, self.walk(node.left), self.walk(node.right))
        if isinstance(node, E.Div):
            return self.emit(OP_DIV, self.walk(node.left), self.walk(node.right))
        if isinstance(node, E.Exp):
            return self.emit(OP_EXP, self.walk(node.arg))
        if isinstance(node, E.Log):
            return self.emit(OP_LOG, self.walk(node.arg))
        if isinstance(node, E.Abs):
            return self.emit(OP_ABS, self.walk(node.arg))
        if isinstance(node, E.Min):
            return self.emit(OP_MIN, self.walk(node.left), self.walk(node.right))
        if isinstance(node, E.Max):
            return self.emit(OP_MAX, self.walk(node.left), self.walk(node.right))
        if isinstance(node, E.Pow):
            base = self.walk(node.base)
            r = node.exponent
            if r == round(r) and abs(r) <= _MAX_INT_POW:
                return self.int_power(base, int(round(r)))
            return self.emit(OP_POWR, base, c=r)
        raise TypeError(f"unknown node {node!r}")


def compile_tape(root: E.Node) -> Tape:
    builder = _Builder()
    # pow(u, 1) returns the operand register itself, so the root is not
    # necessarily the last instruction
    out = builder.walk(root)
    ops = np.asarray(builder.ops, dtype=np.int64)
    return Tape(
        ops=ops,
        arg1=np.asarray(builder.arg1, dtype=np.int64),
        arg2=np.asarray(builder.arg2, dtype=np.int64),
        consts=np.asarray(builder.consts, dtype=np.float64),
        out=out,
        has_kinks=bool(np.isin(ops, _KINK_OPS).any()),
    )
