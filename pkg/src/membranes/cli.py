"""Interactive REPL and batch model-checking front end.

A plain invocation starts the REPL; with arguments, the batch checker
runs: ``membranes <spec.memb> '<configuration>' '<formula>'``.

Bracket arguments mean different things per command: ``compute [n]``
limits the number of solutions, while ``check [b]`` bounds the number of
objects per configuration.  Exit status of the batch checker: 0 when the
property holds, 1 when violated, 2 on usage, parse, or resource errors.
"""

import argparse
import logging
import sys
import time
from pathlib import Path

from membranes import checker, core, engine, graph, kernel, lang, parser
from membranes.lang import DiagnosticsError, MembError

PROMPT = "Membrane> "

HELP_TEXT = """\
Commands:
  help                                   show this message
  load <file>                            load a membrane specification
  show membranes                         list loaded membrane names
  show <M>                               print a membrane definition
  show strats <M>                        print its priority expressions
  set priority (weak|strong)             choose the priority reading
  trans <configuration> .                enumerate one evolution step
  compute [n] <configuration> .          irreducible configurations (BFS)
  dfs compute [n] <configuration> .      same, depth-first
  check [b] <configuration> satisfies <LTL formula> .
                                         model check; b bounds objects
  quit                                   leave the session
"""


class Session:
    def __init__(self, out):
        self.out = out
        self.spec = None
        self.mode = lang.STRONG
        self.base_dir = Path.cwd()

    def write(self, text=""):
        self.out.write(text + "\n")

    @property
    def sep(self):
        return "·"

    def require_spec(self):
        if self.spec is None:
            raise MembError("no specification loaded; use: load <file>")
        return self.spec


def repl(instream=None, outstream=None):
    """Run the interactive command loop; returns the exit status."""
    instream = instream or sys.stdin
    outstream = outstream or sys.stdout
    session = Session(outstream)
    while True:
        outstream.write(PROMPT)
        outstream.flush()
        line = instream.readline()
        if not line:
            outstream.write("\n")
            return 0
        line = line.strip()
        if not line or line.startswith("***"):
            continue
        while _needs_terminator(line) and not line.endswith("."):
            more = instream.readline()
            if not more:
                break
            line = line + " " + more.strip()
        try:
            if _dispatch(session, line) == "quit":
                return 0
        except KeyboardInterrupt:
            session.write("Interrupted.")
        except DiagnosticsError as err:
            for diag in err.diagnostics:
                session.write(str(diag))
        except MembError as err:
            session.write(str(err))


def _needs_terminator(line):
    head = line.split(None, 2)
    if not head:
        return False
    if head[0] in ("trans", "compute", "check"):
        return True
    return head[0] == "dfs" and len(head) > 1 and head[1] == "compute"


def _dispatch(session, line):
    words = line.split()
    head = words[0]
    if head == "quit":
        return "quit"
    if head == "help":
        session.out.write(HELP_TEXT)
        return None
    if head == "load":
        _cmd_load(session, line[len("load"):].strip())
    elif head == "show":
        _cmd_show(session, words[1:])
    elif head == "set":
        _cmd_set(session, words[1:])
    elif head == "trans":
        _cmd_trans(session, _strip_terminator(line[len("trans"):]))
    elif head == "compute":
        _cmd_compute(session, _strip_terminator(line[len("compute"):]), "bfs")
    elif head == "dfs" and len(words) > 1 and words[1] == "compute":
        body = line.split("compute", 1)[1]
        _cmd_compute(session, _strip_terminator(body), "dfs")
    elif head == "check":
        _cmd_check(session, _strip_terminator(line[len("check"):]))
    else:
        session.write(f"unknown command: {head} (try 'help')")
    return None


def _strip_terminator(body):
    body = body.strip()
    if not body.endswith("."):
        raise MembError("command must end with '.'")
    return body[:-1].strip()


def _cmd_load(session, path_text):
    if not path_text:
        raise MembError("usage: load <file>")
    path = (session.base_dir / path_text).resolve() \
        if not Path(path_text).is_absolute() else Path(path_text)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError:
        raise MembError(f"cannot read {path_text}")
    spec = parser.parse_spec(text)
    diags = lang.validate_spec(spec)
    if diags:
        for diag in diags:
            session.write(str(diag))
        return
    session.spec = spec
    session.write(f"File {path_text} has been loaded.")
    previous = session.base_dir
    session.base_dir = path.parent
    try:
        for command in spec.commands:
            _dispatch(session, command)
    finally:
        session.base_dir = previous


def _cmd_show(session, args):
    spec = session.require_spec()
    if not args:
        raise MembError("usage: show membranes | show [strats] <M>")
    if args[0] == "membranes":
        session.write(" ".join(sorted(spec.membranes)))
        return
    if args[0] == "strats":
        if len(args) < 2:
            raise MembError("usage: show strats <M>")
        name = args[1].rstrip(".")
        mdef = _membrane(spec, name)
        labels = [r.label for r in mdef.rules]
        from membranes.strategies import (strong_priority_expression,
                                          weak_priority_expression)
        session.write("Weak priority: "
                      + weak_priority_expression(labels, mdef.priorities))
        session.write("Strong priority: "
                      + strong_priority_expression(labels, mdef.priorities,
                                                   name))
        return
    name = args[0].rstrip(".")
    session.write(parser.render_membrane_def(_membrane(spec, name)))


def _membrane(spec, name):
    mdef = spec.membranes.get(name)
    if mdef is None:
        raise MembError(f"unknown membrane name {name}")
    return mdef


def _cmd_set(session, args):
    if len(args) != 2 or args[0] != "priority" \
            or args[1] not in (lang.WEAK, lang.STRONG):
        raise MembError("usage: set priority (weak|strong)")
    session.mode = args[1]


def _cmd_trans(session, body):
    spec = session.require_spec()
    config = parser.parse_configuration(body, spec)
    results = engine.evolution_step(config, spec, session.mode)
    for i, res in enumerate(results, start=1):
        labels = checker.render_applied(res.applied)[len("with "):]
        session.write(f"Solution {i} with {labels} :")
        session.write("\t" + core.render_configuration(res.config,
                                                       session.sep))
    session.write("No more solutions.")


def _split_bracket(body):
    if body.startswith("["):
        end = body.index("]")
        return int(body[1:end].strip()), body[end + 1:].strip()
    return None, body


def _cmd_compute(session, body, search):
    spec = session.require_spec()
    limit, body = _split_bracket(body)
    config = parser.parse_configuration(body, spec)
    bounds = engine.Bounds(max_solutions=limit)
    solutions, limited = engine.compute_irreducible(
        config, spec, session.mode, bounds, search)
    for i, cfg in enumerate(solutions, start=1):
        session.write(f"Solution {i}:\t"
                      + core.render_configuration(cfg, session.sep))
    session.write("No more solutions requested." if limited
                  else "No more solutions.")


def _cmd_check(session, body):
    spec = session.require_spec()
    bound, body = _split_bracket(body)
    if " satisfies " not in body:
        raise MembError("usage: check [b] <configuration> satisfies "
                        "<formula> .")
    config_text, formula_text = body.split(" satisfies ", 1)
    config = parser.parse_configuration(config_text, spec)
    formula = parser.parse_formula(formula_text, spec)
    layer = lang.formula_layer(formula)
    if layer not in (lang.LTL_LAYER, lang.PROP_LAYER):
        raise MembError("the check command supports LTL formulas; use the "
                        "batch interface for CTL and mu-calculus")
    g = graph.build_graph(config, spec, session.mode,
                          engine.Bounds(max_objects=bound))
    verdict = checker.check_ltl(g, formula)
    if checker.verdict_holds(verdict):
        session.write("The property is satisfied.")
    else:
        session.write("The property is not satisfied:")
        session.write(checker.format_trace(verdict, g, session.sep))
    if g.truncated:
        session.write("Note: bounded result; the state space was truncated "
                      f"at {bound} objects.")


# ---------------------------------------------------------------------------
# Batch checker

def run_check_cli(argv):
    """Check one formula against one initial configuration.

    Exit status: 0 holds, 1 violated, 2 usage/parse/resource error.
    """
    ap = argparse.ArgumentParser(
        prog="membranes",
        description="Model check a membrane system specification.")
    ap.add_argument("spec", help="membrane specification file (.memb)")
    ap.add_argument("config", help="initial configuration term")
    ap.add_argument("formula", help="LTL, CTL, or mu-calculus formula")
    ap.add_argument("--bound", "-b", type=int, default=None,
                    help="treat configurations with >= N objects as absorbing")
    ap.add_argument("--steps", type=int, default=None,
                    help="depth bound on evolution steps")
    ap.add_argument("--mode", choices=(lang.WEAK, lang.STRONG), default=None,
                    help="priority reading (default: strong)")
    ap.add_argument("-v", "--verbose", action="store_true",
                    help="print model statistics")
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2

    if args.verbose:
        logging.basicConfig(level=logging.DEBUG,
                            format="%(name)s: %(message)s")
    try:
        text = Path(args.spec).read_text(encoding="utf-8")
    except OSError:
        print(f"cannot read {args.spec}", file=sys.stderr)
        return 2
    try:
        spec = parser.parse_spec(text)
        diags = lang.validate_spec(spec)
        if diags:
            raise DiagnosticsError(diags)
        config = parser.parse_configuration(args.config, spec)
        formula = parser.parse_formula(args.formula, spec)
        bounds = engine.Bounds(max_steps=args.steps, max_objects=args.bound)
        started = time.perf_counter()
        g = graph.build_graph(config, spec, args.mode, bounds)
        elapsed = time.perf_counter() - started
        if args.verbose:
            edges = sum(len(e) for e in g.edges)
            print(f"Model built: {g.state_count} states, {edges} edges "
                  f"in {elapsed:.2f} s (kernel: {kernel.IMPL}).",
                  file=sys.stderr)
        verdict = checker.check_formula(g, formula)
    except (DiagnosticsError, MembError, ValueError) as err:
        print(str(err), file=sys.stderr)
        return 2

    k = g.state_count
    if checker.verdict_holds(verdict):
        print(f"The property is satisfied ({k} states).")
        status = 0
    else:
        print(f"The property is not satisfied ({k} states)"
              + (":" if isinstance(verdict, checker.LassoCounterexample)
                 else "."))
        if isinstance(verdict, checker.LassoCounterexample):
            print(checker.format_trace(verdict, g))
        status = 1
    if g.truncated:
        print("Note: bounded result; the state space was truncated.",
              file=sys.stderr)
    return status


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    if not argv:
        return repl(sys.stdin, sys.stdout)
    return run_check_cli(argv)


if __name__ == "__main__":
    sys.exit(main())
