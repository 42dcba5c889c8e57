"""The expression language used in configuration files."""
# %%
from kernelconv import evaluate, free_vars, parse, to_text
from kernelconv.errors import EvalError, ParseError
from kernelconv.expr import dump

for text in ("x^2+y^2-1", "-x^2", "2^3^2", "r^2+s^2+(1/j)*log(s^2)-1", "min(x, j)"):
    e = parse(text)
    print(f"{text:28s} -> {to_text(e):60s} vars={sorted(free_vars(e))}")
print(dump(parse("x^2+y^2-1")))

# %% extended-real evaluation: -inf is allowed, +inf and NaN are not
print("(1/j)*log(s^2) at s=0, j=5:", evaluate(parse("(1/j)*log(s^2)"), {"s": 0.0, "j": 5}))
for text in ("0*log(0)", "sqrt(-1)", "1/(x-x)"):
    try:
        evaluate(parse(text), {"x": 1.0})
    except EvalError as err:
        print(f"{text:10s} -> EvalError: {err}")

# %% parse errors carry byte offsets
for text in ("x +* y", "(x", "foo(x)"):
    try:
        parse(text)
    except ParseError as err:
        print(f"{text!r:10s} -> {err}")
