"""Run configuration: INI-style sections of ``key = value`` text.

Grammar: ``[section]`` headers, ``key = value`` lines, ``#`` or ``;``
comments.  Lists are comma separated.  Unknown sections or keys are
rejected so typos fail before any computation.
"""
import configparser
import io

from .errors import ValidationError
from .functions import from_name
from .grid import GridSpec
from .measure import UncertaintySet
from .operator import QuadratureSpec
from .sublinear import LawFamily

COMMANDS = ("pide", "clt-dp", "mc", "oracle", "verify", "compare")

DEFAULTS = {
    "run": {"command": "compare", "seed": "0", "threads": "1"},
    "law": {"alpha": "0.5", "k_lo": "0.25", "k_hi": "0.25", "profile": "pareto_cutoff",
            "k_grid": "3", "knots": "", "values": "", "gamma": "1.0", "C": "1.0"},
    "phi": {"name": "cos"},
    "grid": {"half_width": "8", "spacing": "0.015625", "extension": "geometric"},
    "quad": {"epsilon": "1e-4", "outer_cut": "1000", "nodes_per_decade": "64", "tol": "1e-8"},
    "dp": {"n_list": "16, 64, 256, 1024", "tol": "1e-6", "profile_csv": "no"},
    "pide": {"dt": "auto", "T": "1.0", "levels": "1"},
    "mc": {"n_list": "4096", "paths": "100000"},
    "oracle": {"x_max": "10", "points": "201"},
    "verify": {"delta": "0.25", "cap": "4", "n_list": "4, 16, 64, 256, 1024",
               "s_exponents": "4, 14", "x_grid": "-3, 3, 13", "trials": "100", "axiom_tol": "1e-6"},
    "compare": {"tolerance": "0.02"},
}


def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


class RunConfig:
    """Resolved configuration; every value is kept as text for exact round trips."""

    def __init__(self, sections=None):
        self.sections = {s: dict(v) for s, v in DEFAULTS.items()}
        for name, items in (sections or {}).items():
            if name not in DEFAULTS:
                raise ValidationError(f"unknown section [{name}]")
            for key, val in items.items():
                if key not in DEFAULTS[name]:
                    raise ValidationError(f"unknown key {key!r} in [{name}]")
                self.sections[name][key] = str(val).strip()

    # -- text form ------------------------------------------------------
    @classmethod
    def parse(cls, text):
        cp = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"))
        cp.optionxform = str
        try:
            cp.read_string(text)
        except configparser.Error as exc:
            raise ValidationError(f"config syntax: {exc}") from None
        return cls({s: dict(cp[s]) for s in cp.sections()})

    @classmethod
    def load(cls, path):
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ValidationError(f"cannot read config: {exc}") from None
        return cls.parse(text)

    def dumps(self):
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str
        for name, items in self.sections.items():
            cp[name] = items
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    def __eq__(self, other):
        return isinstance(other, RunConfig) and self.sections == other.sections

    def set(self, section, key, value):
        RunConfig({section: {key: value}})
        self.sections[section][key] = str(value)

    def get(self, section, key):
        return self.sections[section][key]

    # -- typed views ----------------------------------------------------
    def _num(self, section, key, kind=float):
        raw = self.sections[section][key]
        try:
            return kind(raw)
        except ValueError:
            raise ValidationError(f"[{section}] {key} = {raw!r} is not a {kind.__name__}") from None

    @property
    def command(self):
        c = self.sections["run"]["command"]
        if c not in COMMANDS:
            raise ValidationError(f"unknown command {c!r}")
        return c

    @property
    def seed(self):
        s = self._num("run", "seed", int)
        if not 0 <= s < 2 ** 64:
            raise ValidationError("seed must be an unsigned 64-bit integer")
        return s

    @property
    def threads(self):
        t = self._num("run", "threads", int)
        if t < 1:
            raise ValidationError("threads must be >= 1")
        return t

    def family(self):
        law = self.sections["law"]
        custom = {}
        if law["profile"] == "custom":
            custom = {"knots": tuple(_floats(law["knots"])), "values": tuple(_floats(law["values"])),
                      "gamma": self._num("law", "gamma"), "C": self._num("law", "C")}
        return LawFamily(self._num("law", "k_lo"), self._num("law", "k_hi"), self._num("law", "alpha"),
                         law["profile"], self._num("law", "k_grid", int), custom)

    def uncertainty_set(self):
        f = self.family()
        return UncertaintySet(f.alpha, 2.0 * f.k_lo, 2.0 * f.k_hi)

    def phi(self):
        return from_name(self.sections["phi"]["name"])

    def grid(self):
        g = self.sections["grid"]
        return GridSpec.from_spacing(self._num("grid", "half_width"), self._num("grid", "spacing"),
                                     extension=g["extension"])

    def quad(self):
        return QuadratureSpec(self._num("quad", "epsilon"), self._num("quad", "outer_cut"),
                              self._num("quad", "nodes_per_decade", int), self._num("quad", "tol"))

    def int_list(self, section, key="n_list"):
        vals = _floats(self.sections[section][key])
        if not vals or any(v != int(v) or v < 1 for v in vals):
            raise ValidationError(f"[{section}] {key} must list positive integers")
        return [int(v) for v in vals]

    def solver_spec(self):
        from .pide import SolverSpec
        dt = self.sections["pide"]["dt"]
        return SolverSpec(self.grid(), dt if dt == "auto" else self._num("pide", "dt"), self.quad(),
                          self._num("pide", "T"))

    def verify_params(self):
        v = self.sections["verify"]
        delta, cap = self._num("verify", "delta"), self._num("verify", "cap")
        alpha = self._num("law", "alpha")
        if not 0 < delta < alpha:
            raise ValidationError(f"need 0 < delta < alpha, got delta={delta}, alpha={alpha}")
        if cap <= 0:
            raise ValidationError("cap must be positive")
        j0, j1 = (int(v) for v in _floats(v["s_exponents"]))
        if not 0 <= j0 < j1:
            raise ValidationError("s_exponents must be increasing")
        lo, hi, m = _floats(v["x_grid"])
        return {"delta": delta, "cap": cap, "n_list": self.int_list("verify"),
                "s_list": [2.0 ** -j for j in range(j0, j1 + 1)], "x_grid": (lo, hi, int(m)),
                "trials": self._num("verify", "trials", int), "axiom_tol": self._num("verify", "axiom_tol")}

    def validate(self):
        """Build every typed view once; raises ValidationError/DomainError on bad input."""
        self.command, self.seed, self.threads
        self.family().law(self.family().k_lo)
        self.uncertainty_set()
        self.phi()
        self.grid()
        self.quad()
        self.int_list("dp")
        self.int_list("mc")
        if self._num("mc", "paths", int) < 100:
            raise ValidationError("[mc] paths must be >= 100")
        self._num("dp", "tol")
        self.solver_spec().resolve_dt(self.uncertainty_set())
        if self._num("pide", "levels", int) < 1:
            raise ValidationError("[pide] levels must be >= 1")
        self._num("oracle", "x_max")
        self._num("oracle", "points", int)
        self._num("compare", "tolerance")
        self.verify_params()
        return self
