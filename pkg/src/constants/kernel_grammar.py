# Kernel text is parsed as the body of this C function.
KERNEL_FUNCTION_NAME = "kernel"

# Declared type -> whether locals of that type hold integers.
KERNEL_TYPES = {
    "double": False,
    "float": False,
    "int": True,
    "long": True,
    "long int": True,
    "long long": True,
}

# name -> arity
KERNEL_BUILTINS = {"sqrt": 1}

ASSIGNMENT_OPERATORS = ("=", "+=", "-=", "*=", "/=")
UPDATE_OPERATORS = {"++": "+=", "--": "-="}
BINARY_OPERATORS = (
    "+",
    "-",
    "*",
    "/",
    "%",
    "<",
    "<=",
    ">",
    ">=",
    "==",
    "!=",
    "&&",
    "||",
)
UNARY_OPERATORS = ("-", "+", "!")
PARTICLE_SIDES = ("i", "j")
