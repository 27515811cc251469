#!/usr/bin/env python3
"""Decide a first-order TPTP problem with z3 and print an SZS status line.

Reads the fof subset written by `sygns prove --emit-tptp`: one annotated
formula per statement, roles axiom and conjecture, connectives ~ & | =>
<=>, quantifiers ! and ?, predicates applied to variables and constants.
"""

import argparse
import re
import sys

import z3

TOKEN = re.compile(r"\s*(<=>|=>|\$true|\$false|[A-Za-z_][A-Za-z0-9_]*|[()\[\],.:~&|!?])")


def tokenize(text):
    text = "\n".join(line for line in text.splitlines() if not line.lstrip().startswith("%"))
    pos, out = 0, []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = TOKEN.match(text, pos)
        if not m:
            raise SyntaxError(f"unexpected input at offset {pos}")
        out.append(m.group(1))
        pos = m.end()
    return out


class Parser:
    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0
        self.sort = z3.DeclareSort("U")
        self.preds = {}
        self.consts = {}

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, expected=None):
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise SyntaxError(f"expected {expected!r}, found {tok!r}")
        self.i += 1
        return tok

    def problem(self):
        axioms, conjectures = [], []
        while self.peek() is not None:
            self.take("fof")
            self.take("(")
            self.take()
            self.take(",")
            role = self.take()
            self.take(",")
            formula = self.formula({})
            self.take(")")
            self.take(".")
            (conjectures if role == "conjecture" else axioms).append(formula)
        return axioms, conjectures

    def formula(self, env):
        left = self.unary(env)
        tok = self.peek()
        if tok in ("&", "|"):
            parts = [left]
            while self.peek() == tok:
                self.take()
                parts.append(self.unary(env))
            return z3.And(*parts) if tok == "&" else z3.Or(*parts)
        if tok == "=>":
            self.take()
            return z3.Implies(left, self.unary(env))
        if tok == "<=>":
            self.take()
            return left == self.unary(env)
        return left

    def unary(self, env):
        tok = self.peek()
        if tok == "~":
            self.take()
            return z3.Not(self.unary(env))
        if tok == "(":
            self.take()
            f = self.formula(env)
            self.take(")")
            return f
        if tok in ("!", "?"):
            self.take()
            self.take("[")
            names = [self.take()]
            while self.peek() == ",":
                self.take()
                names.append(self.take())
            self.take("]")
            self.take(":")
            inner = dict(env)
            bound = []
            for n in names:
                v = z3.Const(n, self.sort)
                inner[n] = v
                bound.append(v)
            body = self.unary(inner)
            return z3.ForAll(bound, body) if tok == "!" else z3.Exists(bound, body)
        if tok == "$true":
            self.take()
            return z3.BoolVal(True)
        if tok == "$false":
            self.take()
            return z3.BoolVal(False)
        return self.atom(env)

    def term(self, env):
        name = self.take()
        if name in env:
            return env[name]
        if name not in self.consts:
            self.consts[name] = z3.Const("c_" + name, self.sort)
        return self.consts[name]

    def atom(self, env):
        name = self.take()
        args = []
        if self.peek() == "(":
            self.take()
            args.append(self.term(env))
            while self.peek() == ",":
                self.take()
                args.append(self.term(env))
            self.take(")")
        key = (name, len(args))
        if key not in self.preds:
            sig = [self.sort] * len(args) + [z3.BoolSort()]
            self.preds[key] = z3.Function(f"{name}_{len(args)}", *sig)
        return self.preds[key](*args)


def describe(result, if_unsat, if_sat):
    if result == z3.unsat:
        return if_unsat
    if result == z3.sat:
        return if_sat
    return "GaveUp"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("problem")
    ap.add_argument("--timeout", type=float, default=10.0, help="seconds")
    args = ap.parse_args()
    with open(args.problem, encoding="ascii") as fh:
        text = fh.read()
    try:
        axioms, conjectures = Parser(tokenize(text)).problem()
    except SyntaxError as e:
        print(f"% {e}")
        print(f"% SZS status SyntaxError for {args.problem}")
        return 0
    solver = z3.Solver()
    solver.set("timeout", int(args.timeout * 1000))
    solver.add(*axioms)
    if not conjectures:
        status = describe(solver.check(), "Unsatisfiable", "Satisfiable")
    elif solver.check() == z3.unsat:
        status = "ContradictoryAxioms"
    else:
        solver.add(z3.Not(z3.And(*conjectures)))
        status = describe(solver.check(), "Theorem", "CounterSatisfiable")
    print(f"% SZS status {status} for {args.problem}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
