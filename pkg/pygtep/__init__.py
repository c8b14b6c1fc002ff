# -*- coding: utf-8 -*-

"""Top-level package for pygtep."""

from pygtep.__version__ import __title__, __description__, __url__, __version__
from pygtep.__version__ import (
    __author__,
    __author_email__,
    __license__,
    __copyright__,
)

from .analysis import PlanEvaluation, VssResult, compute_vss, evaluate_plan, solve_mvp
from .benders import BendersConfig, SolveReport, run_benders, run_monolithic
from .calendars import RepresentativeCalendar, ScenarioSet, load_calendar, load_scenarios
from .catalog import InvestmentPlan, VariableCatalog
from .formulation import build_master, build_monolithic, build_subproblem
from .lp import LpBuilder, LpProblem, SolverOptions, Status
from .solver import solve_lp, solve_milp
from .system import SystemInstance, load_instance
from .validation import validate_instance
