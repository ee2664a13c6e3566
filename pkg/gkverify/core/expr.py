"""
🔤 Expresiones en coordenadas

Este módulo convierte texto como ``"sqrt(1 - a1^2) * sin(x2)"`` en un árbol
inmutable y lo evalúa en puntos del parche, ya sea como número o como Jet
(valor más derivadas parciales exactas).

Gramática:

    expr     := term (('+' | '-') term)*
    term     := unary (('*' | '/') unary)*
    unary    := ('-' | '+') unary | power
    power    := atom ('^' unary)*          (exponente constante)
    atom     := NUMBER | IDENT | FUNC '(' expr ')' | '(' expr ')'

Precedencia: ^ > menos unario > * / > + -, todo asociativo a la izquierda.
"""

import math
import re
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import ArityError, ExprDomainError, ExprSyntaxError, UnknownIdentifierError
from .jet import Jet

FUNCTIONS: Dict[str, int] = {"sin": 1, "cos": 1, "exp": 1, "log": 1, "sqrt": 1}
CONSTANTS: Dict[str, float] = {"pi": math.pi}

# Operadores binarios: (precedencia, asociatividad)
BINARY_OPERATORS: Dict[str, Tuple[int, str]] = {
    "+": (1, "left"),
    "-": (1, "left"),
    "*": (2, "left"),
    "/": (2, "left"),
    "^": (4, "left"),
}
UNARY_PRECEDENCE = 3

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)


# =============================================================================
# 🌳 NODOS DEL ÁRBOL
# =============================================================================

class Expr:
    """Nodo base de expresión (inmutable)"""

    def is_constant(self) -> bool:
        raise NotImplementedError

    def value(self, point: Sequence[float]) -> float:
        raise NotImplementedError

    def jet(self, point: Sequence[float]) -> Jet:
        raise NotImplementedError


@dataclass(frozen=True)
class Const(Expr):
    value_: float

    def is_constant(self) -> bool:
        return True

    def value(self, point):
        return self.value_

    def jet(self, point):
        return Jet(self.value_, np.zeros(len(point)))


@dataclass(frozen=True)
class Var(Expr):
    index: int

    def is_constant(self) -> bool:
        return False

    def value(self, point):
        return float(point[self.index])

    def jet(self, point):
        return Jet.variable(point, self.index)


@dataclass(frozen=True)
class Unary(Expr):
    op: str
    arg: Expr

    def is_constant(self) -> bool:
        return self.arg.is_constant()

    def value(self, point):
        x = self.arg.value(point)
        _check_unary(self.op, x, point)
        if self.op == "neg":
            return -x
        return float(getattr(np, self.op)(x))

    def jet(self, point):
        x = self.arg.jet(point)
        _check_unary(self.op, float(x.value), point)
        if self.op == "neg":
            return -x
        return getattr(x, self.op)()


@dataclass(frozen=True)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr

    def is_constant(self) -> bool:
        return self.left.is_constant() and self.right.is_constant()

    def value(self, point):
        return _apply_binary(self.op, self.left.value(point), self.right.value(point), point)

    def jet(self, point):
        return _apply_binary(self.op, self.left.jet(point), self.right.jet(point), point)


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: float

    def is_constant(self) -> bool:
        return self.base.is_constant()

    def value(self, point):
        x = self.base.value(point)
        _check_pow(x, self.exponent, point)
        return float(x ** self.exponent)

    def jet(self, point):
        x = self.base.jet(point)
        _check_pow(float(x.value), self.exponent, point)
        return x ** self.exponent


def _check_unary(op: str, x: float, point) -> None:
    if op == "log" and x <= 0:
        raise ExprDomainError(f"log de argumento no positivo ({x:.6g})", point)
    if op == "sqrt" and x <= 0:
        raise ExprDomainError(f"sqrt de argumento no positivo ({x:.6g})", point)


def _check_pow(x: float, exponent: float, point) -> None:
    if float(exponent).is_integer():
        if x == 0 and exponent < 0:
            raise ExprDomainError("potencia negativa de cero", point)
        return
    if x < 0 or (x == 0 and exponent < 1):
        raise ExprDomainError(f"potencia no entera de base {x:.6g}", point)


def _apply_binary(op: str, left, right, point):
    if op == "+":
        return left + right
    if op == "-":
        return left - right
    if op == "*":
        return left * right
    divisor = float(right.value) if isinstance(right, Jet) else right
    if divisor == 0:
        raise ExprDomainError("división por cero", point)
    return left / right


# =============================================================================
# 🔍 ANALIZADOR
# =============================================================================

@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    offset: int


def tokenize(text: str) -> List[Token]:
    """Dividir el texto en tokens con desplazamiento en bytes"""
    tokens: List[Token] = []
    position = 0
    while position < len(text):
        if text[position:].strip() == "":
            break
        match = _TOKEN_RE.match(text, position)
        if match is None or match.end() == position:
            start = position + (len(text[position:]) - len(text[position:].lstrip()))
            raise ExprSyntaxError(f"Carácter inesperado {text[start]!r}", text, _byte_offset(text, start))
        kind = match.lastgroup
        start = match.start(kind)
        tokens.append(Token(kind, match.group(kind), _byte_offset(text, start)))
        position = match.end()
    tokens.append(Token("end", "", len(text.encode("utf-8"))))
    return tokens


def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


class Parser:
    """Analizador por escalada de precedencia"""

    def __init__(self, text: str, coords: Sequence[str], parameters: Optional[Mapping[str, float]] = None):
        self.text = text
        self.coords = {name: i for i, name in enumerate(coords)}
        self.parameters = dict(parameters or {})
        self.tokens = tokenize(text)
        self.position = 0

    def peek(self) -> Token:
        return self.tokens[self.position]

    def advance(self) -> Token:
        token = self.tokens[self.position]
        self.position += 1
        return token

    def expect(self, text: str) -> Token:
        token = self.advance()
        if token.text != text:
            found = token.text or "fin de entrada"
            raise ExprSyntaxError(f"Se esperaba '{text}' y se encontró '{found}'", self.text, token.offset)
        return token

    def parse(self) -> Expr:
        if self.peek().kind == "end":
            raise ExprSyntaxError("Expresión vacía", self.text, 0)
        node = self.parse_expression(0)
        token = self.peek()
        if token.kind != "end":
            raise ExprSyntaxError(f"Token inesperado '{token.text}'", self.text, token.offset)
        return node

    def parse_expression(self, min_precedence: int) -> Expr:
        left = self.parse_unary()
        while True:
            token = self.peek()
            if token.kind != "op" or token.text not in BINARY_OPERATORS:
                return left
            precedence, associativity = BINARY_OPERATORS[token.text]
            if precedence < min_precedence:
                return left
            self.advance()
            next_min = precedence + 1 if associativity == "left" else precedence
            right = self.parse_expression(next_min)
            if token.text == "^":
                left = Pow(left, self._constant_exponent(right, token))
            else:
                left = Binary(token.text, left, right)

    def parse_unary(self) -> Expr:
        token = self.peek()
        if token.kind == "op" and token.text in "+-":
            self.advance()
            operand = self.parse_expression(UNARY_PRECEDENCE + 1)
            if token.text == "+":
                return operand
            if isinstance(operand, Const):
                return Const(-operand.value_)
            return Unary("neg", operand)
        return self.parse_atom()

    def parse_atom(self) -> Expr:
        token = self.advance()
        if token.kind == "number":
            return self._finite(float(token.text), token)
        if token.kind == "ident":
            return self._identifier(token)
        if token.text == "(":
            node = self.parse_expression(0)
            self.expect(")")
            return node
        found = token.text or "fin de entrada"
        raise ExprSyntaxError(f"Token inesperado '{found}'", self.text, token.offset)

    def _identifier(self, token: Token) -> Expr:
        name = token.text
        if name in FUNCTIONS:
            if self.peek().text != "(":
                raise ExprSyntaxError(f"Se esperaba '(' tras '{name}'", self.text, self.peek().offset)
            self.advance()
            args: List[Expr] = []
            if self.peek().text != ")":
                args.append(self.parse_expression(0))
                while self.peek().text == ",":
                    self.advance()
                    args.append(self.parse_expression(0))
            self.expect(")")
            if len(args) != FUNCTIONS[name]:
                raise ArityError(name, FUNCTIONS[name], len(args), token.offset)
            return Unary(name, args[0])
        if name in self.coords:
            return Var(self.coords[name])
        if name in self.parameters:
            return self._finite(float(self.parameters[name]), token)
        if name in CONSTANTS:
            return Const(CONSTANTS[name])
        raise UnknownIdentifierError(name, self.text, token.offset)

    def _constant_exponent(self, node: Expr, token: Token) -> float:
        if not node.is_constant():
            raise ExprSyntaxError("El exponente debe ser constante", self.text, token.offset)
        exponent = float(node.value(()))
        if not math.isfinite(exponent):
            raise ExprSyntaxError(f"Exponente no finito ({exponent!r})", self.text, token.offset)
        return exponent

    def _finite(self, value: float, token: Token) -> Const:
        if not math.isfinite(value):
            raise ExprSyntaxError(f"Constante no finita '{token.text}'", self.text, token.offset)
        return Const(value)


def parse_expr(text: str, coords: Sequence[str], parameters: Optional[Mapping[str, float]] = None) -> Expr:
    """
    Analizar una expresión sobre las coordenadas dadas.

    Args:
        text: texto de la expresión
        coords: nombres de coordenadas (Var i ↔ coords[i])
        parameters: parámetros con nombre, sustituidos como constantes

    Returns:
        Árbol Expr inmutable
    """
    return Parser(text, coords, parameters).parse()


def eval_jet(expr: Expr, point: Sequence[float]) -> Jet:
    """Evaluar valor y gradiente exacto en el punto"""
    return expr.jet(np.asarray(point, dtype=float))


def eval_value(expr: Expr, point: Sequence[float]) -> float:
    """Evaluar solo el valor en el punto"""
    return expr.value(np.asarray(point, dtype=float))


# =============================================================================
# 🖨️ IMPRESIÓN
# =============================================================================

def to_text(expr: Expr, coords: Sequence[str]) -> str:
    """Texto totalmente parentizado que vuelve a analizarse al mismo árbol"""
    if isinstance(expr, Const):
        if not math.isfinite(expr.value_):
            raise ValueError(f"Constante no representable: {expr.value_!r}")
        return f"({expr.value_!r})" if math.copysign(1.0, expr.value_) < 0 else repr(expr.value_)
    if isinstance(expr, Var):
        return coords[expr.index]
    if isinstance(expr, Unary):
        inner = to_text(expr.arg, coords)
        return f"(-{inner})" if expr.op == "neg" else f"{expr.op}({inner})"
    if isinstance(expr, Binary):
        return f"({to_text(expr.left, coords)} {expr.op} {to_text(expr.right, coords)})"
    if isinstance(expr, Pow):
        exponent = to_text(Const(expr.exponent), coords)
        return f"({to_text(expr.base, coords)}^{exponent})"
    raise TypeError(f"Nodo desconocido: {expr!r}")
