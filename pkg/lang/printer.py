"""Pretty printer; ``parse(print_program(ctx, c))`` gives back ``(ctx, normalize(c))``."""
from . import ast
from .ast import VarContext

INDENT = "  "


def print_program(ctx: VarContext, command: ast.Command) -> str:
    body = print_command(command)
    if not len(ctx):
        return body + "\n"
    header = "var " + ", ".join(str(v) for v in ctx) + ";"
    return f"{header}\n{body}\n"


def print_command(command: ast.Command, depth: int = 0) -> str:
    return ";\n".join(_lines(c, depth) for c in ast.flatten(command))


def _lines(command: ast.Command, depth: int) -> str:
    pad = INDENT * depth
    inner = depth + 1
    match command:
        case ast.Skip():
            return f"{pad}skip"
        case ast.InitZero(var=v):
            return f"{pad}{v} := 0"
        case ast.AssignBit(var=v, value=value):
            return f"{pad}{v} := {value}"
        case ast.ApplyU(vars=vs, gate=gate):
            return f"{pad}{', '.join(vs)} *= {gate}"
        case ast.NewBit(var=v):
            return f"{pad}new bit {v}"
        case ast.NewQbit(var=v):
            return f"{pad}new qbit {v}"
        case ast.Discard(var=v):
            return f"{pad}discard {v}"
        case ast.IfBit(var=v, then=then, orelse=orelse):
            return _conditional(f"{pad}if {v}", then, orelse, depth)
        case ast.MeasureIf(var=v, then=then, orelse=orelse):
            return _conditional(f"{pad}measure {v}", then, orelse, depth)
        case ast.MeasureCase(meas=meas, vars=vs, branches=branches):
            cases = [f"{pad}{INDENT}case {m}:\n{print_command(branch, inner + 1)}"
                     for m, branch in enumerate(branches)]
            return "\n".join([f"{pad}measure {meas}({', '.join(vs)}) {{", *cases, f"{pad}}}"])
        case ast.While(meas=meas, vars=vs, body=body):
            return f"{pad}while {meas}({', '.join(vs)}) = 1 do\n{print_command(body, inner)}\n{pad}od"
    raise TypeError(f"cannot print {type(command).__name__}")


def _conditional(head: str, then: ast.Command, orelse: ast.Command, depth: int) -> str:
    pad = INDENT * depth
    return "\n".join([
        f"{head} then",
        print_command(then, depth + 1),
        f"{pad}else",
        print_command(orelse, depth + 1),
        f"{pad}fi",
    ])
