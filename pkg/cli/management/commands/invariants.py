from graded.dataclasses import GradedModule
from graded.invariants import module_invariants, support_height_profile
from graded.resolution import minimal_graded_resolution
from cli.io import ReportCommand, load


class Command(ReportCommand):
    help = "Reports dim, depth, grade, projdim and perfection of a graded module."

    def add_command_arguments(self, parser):
        parser.add_argument('module', type=str, help="Module file (presentation over F_p[T_1..T_q])")

    def run(self, **options):
        M = load(options['module'], GradedModule.from_dict)
        invariants = module_invariants(M)
        data = invariants.to_dict()
        data["support_heights"] = list(support_height_profile(M))
        text = ", ".join(f"{key} {value}" for key, value in data.items())
        if invariants.projdim is not None:
            betti = minimal_graded_resolution(M).betti
            data["betti"] = betti.to_dict()
            text += f"\n{betti}"
        return data, text
