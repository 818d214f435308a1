"""
Recursive-descent parser.

    program := ['var' decl (',' decl)* ';'] stmts
    decl    := ident ':' ('bit' | 'qbit' | 'qunit' ['[' int ']'])
    stmts   := stmt (';' stmt)* [';']
    stmt    := 'skip' | ident ':=' ('0' | '1') | ident (',' ident)* '*=' gate
             | 'new' ('bit' | 'qbit') ident | 'discard' ident
             | 'if' ident 'then' stmts 'else' stmts 'fi'
             | 'measure' ident 'then' stmts 'else' stmts 'fi'
             | 'measure' meas '(' idents ')' '{' ('case' int ':' stmts)+ '}'
             | 'while' meas '(' idents ')' '=' '1' 'do' stmts 'od'

``x := 0`` is an assignment when ``x`` is a bit and an initialization otherwise.
"""
from django.conf import settings

from . import ast
from .ast import Kind, Var, VarContext
from .exceptions import DuplicateDeclaration, ParseError
from .lexer import Token, tokenize

# Tokens that close a statement list.
TERMINATORS = frozenset({'else', 'fi', 'od', 'case', '}'})


class Parser:
    def __init__(self, text: str, kinds: dict[str, Kind] | None = None):
        self.tokens = tokenize(text)
        self.index = 0
        self.kinds = dict(kinds or {})

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.index + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        token = self.peek()
        if token.kind != 'EOF':
            self.index += 1
        return token

    def error(self, message: str, token: Token | None = None):
        token = token or self.peek()
        found = "end of input" if token.kind == 'EOF' else repr(token.text)
        return ParseError(f"{message}, found {found}", token.line, token.column)

    def expect(self, text: str) -> Token:
        if not self.peek().is_(text):
            raise self.error(f"expected '{text}'")
        return self.advance()

    def ident(self) -> Token:
        if self.peek().kind != 'IDENT':
            raise self.error("expected an identifier")
        return self.advance()

    def known(self, token: Token) -> str:
        if token.text not in self.kinds:
            raise ParseError(f"undeclared variable '{token.text}'", token.line, token.column)
        return token.text

    def expect_end(self):
        if self.peek().kind != 'EOF':
            raise self.error("expected end of input")

    def program(self) -> tuple[VarContext, ast.Command]:
        ctx = VarContext()
        if self.peek().is_('var'):
            self.advance()
            decls = [self.decl()]
            while self.peek().is_(','):
                self.advance()
                decls.append(self.decl())
            self.expect(';')
            ctx = VarContext(tuple(decls))
        command = self.statements()
        self.expect_end()
        return ctx, command

    def decl(self) -> Var:
        name = self.ident()
        if name.text in self.kinds:
            raise DuplicateDeclaration(f"variable '{name.text}' declared twice", name.line, name.column)
        self.expect(':')
        token = self.advance()
        if not token.is_('bit') and not token.is_('qbit') and not token.is_('qunit'):
            raise self.error("expected 'bit', 'qbit' or 'qunit'", token)
        kind = Kind(token.text)
        dim = 2
        if kind is Kind.QUNIT:
            dim = settings.QHL_QUNIT_DIM
            if self.peek().is_('['):
                self.advance()
                size = self.integer()
                self.expect(']')
                if size < 2:
                    raise ParseError("qunit dimension must be at least 2", name.line, name.column)
                dim = size
        self.kinds[name.text] = kind
        return Var(name.text, kind, dim)

    def integer(self) -> int:
        if self.peek().kind != 'INT':
            raise self.error("expected an integer")
        return int(self.advance().text)

    def statements(self) -> ast.Command:
        commands = [self.statement()]
        while self.peek().is_(';'):
            self.advance()
            following = self.peek()
            if following.kind == 'EOF' or (following.kind in ('KEYWORD', 'PUNCT') and following.text in TERMINATORS):
                break
            commands.append(self.statement())
        return ast.seq(*commands)

    def statement(self) -> ast.Command:
        token = self.peek()
        if token.kind == 'IDENT':
            return self.assignment()
        if token.kind != 'KEYWORD':
            raise self.error("expected a statement")
        handler = {
            'skip': self.skip,
            'new': self.new,
            'discard': self.discard,
            'if': self.if_bit,
            'measure': self.measure,
            'while': self.loop,
        }.get(token.text)
        if handler is None:
            raise self.error("expected a statement")
        return handler()

    def skip(self):
        token = self.advance()
        return ast.Skip(pos=token.pos)

    def assignment(self):
        first = self.ident()
        if self.peek().is_(':='):
            self.advance()
            name = self.known(first)
            value = self.peek()
            if value.kind != 'INT' or value.text not in ('0', '1'):
                raise self.error("expected 0 or 1")
            self.advance()
            if value.text == '0' and self.kinds[name] is not Kind.BIT:
                return ast.InitZero(name, pos=first.pos)
            return ast.AssignBit(name, int(value.text), pos=first.pos)
        targets = [self.known(first)]
        while self.peek().is_(','):
            self.advance()
            targets.append(self.known(self.ident()))
        self.expect('*=')
        gate = self.ident()
        return ast.ApplyU(tuple(targets), gate.text, pos=first.pos)

    def new(self):
        start = self.advance()
        token = self.advance()
        if not token.is_('bit') and not token.is_('qbit'):
            raise self.error("expected 'bit' or 'qbit'", token)
        name = self.ident()
        self.kinds[name.text] = Kind(token.text)
        if token.text == 'bit':
            return ast.NewBit(name.text, pos=start.pos)
        return ast.NewQbit(name.text, pos=start.pos)

    def discard(self):
        start = self.advance()
        return ast.Discard(self.known(self.ident()), pos=start.pos)

    def branches(self):
        self.expect('then')
        then = self.statements()
        self.expect('else')
        orelse = self.statements()
        self.expect('fi')
        return then, orelse

    def if_bit(self):
        start = self.advance()
        guard = self.known(self.ident())
        return ast.IfBit(guard, *self.branches(), pos=start.pos)

    def measure(self):
        start = self.advance()
        name = self.ident()
        if self.peek().is_('then'):
            return ast.MeasureIf(self.known(name), *self.branches(), pos=start.pos)
        targets = self.targets()
        self.expect('{')
        cases = {}
        while self.peek().is_('case'):
            case = self.advance()
            outcome = self.integer()
            if outcome in cases:
                raise ParseError(f"case {outcome} given twice", case.line, case.column)
            self.expect(':')
            cases[outcome] = self.statements()
        if not cases:
            raise self.error("expected 'case'")
        closing = self.expect('}')
        if sorted(cases) != list(range(len(cases))):
            raise ParseError("cases must number the outcomes 0, 1, ... without gaps",
                             closing.line, closing.column)
        return ast.MeasureCase(name.text, targets, tuple(cases[m] for m in range(len(cases))), pos=start.pos)

    def targets(self) -> tuple[str, ...]:
        self.expect('(')
        names = [self.known(self.ident())]
        while self.peek().is_(','):
            self.advance()
            names.append(self.known(self.ident()))
        self.expect(')')
        return tuple(names)

    def loop(self):
        start = self.advance()
        meas = self.ident()
        targets = self.targets()
        self.expect('=')
        one = self.peek()
        if one.kind != 'INT' or one.text != '1':
            raise self.error("expected 1")
        self.advance()
        self.expect('do')
        body = self.statements()
        self.expect('od')
        return ast.While(meas.text, targets, body, pos=start.pos)


def parse(text: str) -> tuple[VarContext, ast.Command]:
    """Parse a whole program: ``(context, command)``."""
    return Parser(text).program()


def parse_statement(text: str, ctx: VarContext) -> ast.Command:
    """Parse a statement list whose free variables come from ``ctx``."""
    parser = Parser(text, {v.name: v.kind for v in ctx})
    command = parser.statements()
    parser.expect_end()
    return command
