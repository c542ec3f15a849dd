from complexes.dataclasses import FreeComplex
from complexes.operations import check_complex, minimize, tau_profile
from cli.io import ReportCommand, load


class Command(ReportCommand):
    help = "Writes the canonical minimal model of a complex."

    def add_command_arguments(self, parser):
        parser.add_argument('complex', type=str, help="Complex file")

    def run(self, **options):
        C = load(options['complex'], FreeComplex.from_dict)
        check_complex(C)
        minimal = minimize(C)
        data = {"complex": minimal.to_dict(), "tau": tau_profile(minimal).to_dict()}
        text = "\n".join([str(minimal)] + [
            f"d^{minimal.lo + k} = {matrix}" for k, matrix in enumerate(minimal.differentials)
        ])
        return data, text
