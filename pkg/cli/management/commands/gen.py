from django.conf import settings

from cli.io import ReportCommand
from cli.scenarios import I_TEMPLATES, TEMPLATES, Perturbation, ScenarioParams, gen_scenario


class Command(ReportCommand):
    help = "Generates a ground-truth patching tower and its sidecar."

    def add_command_arguments(self, parser):
        parser.add_argument('--p', type=int, default=3, help="Residue characteristic")
        parser.add_argument('--q', type=int, default=2, help="Number of T variables")
        parser.add_argument('--r', type=int, default=1, help="Length of the Koszul part")
        parser.add_argument('--d', type=int, default=None, help="Top degree (defaults to q)")
        parser.add_argument('--levels', type=int, default=3, help="Number of tower levels")
        parser.add_argument(
            '--precisions',
            type=int,
            nargs='+',
            default=None,
            help="Precision of every level (defaults to 2 throughout)"
        )
        parser.add_argument('--seed', type=int, default=settings.DEFAULT_SEED, help="Seed of the padding layout")
        parser.add_argument('--rank', type=int, default=1, help="Free rank of H over R")
        parser.add_argument('--template', choices=TEMPLATES, default='koszul', help="Shape of F_inf")
        parser.add_argument('--i-template', choices=I_TEMPLATES, default='identity', help="Images of the T_j")
        parser.add_argument('--padding', type=int, default=0, help="Contractible pieces mixed into each level")
        parser.add_argument('--truncation', type=int, default=None, help="Truncation degree of the R_inf model")
        parser.add_argument('--precision', type=int, default=2, help="Precision of the recorded limit")
        parser.add_argument(
            '--perturbation',
            choices=[perturbation.value for perturbation in Perturbation],
            default='none',
            help="Hypothesis to break"
        )
        parser.add_argument('--out-dir', type=str, default='.', help="Directory for tower.json and sidecar.json")

    def run(self, **options):
        params = ScenarioParams(
            p=options['p'],
            q=options['q'],
            r=options['r'],
            d=options['d'],
            levels=options['levels'],
            precisions=tuple(options['precisions']) if options['precisions'] else None,
            seed=options['seed'],
            rank=options['rank'],
            template=options['template'],
            i_template=options['i_template'],
            padding=options['padding'],
            truncation=options['truncation'],
            target=options['precision'],
        )
        files = gen_scenario(params, Perturbation(options['perturbation']))
        tower_path, sidecar_path = files.write(options['out_dir'])
        data = {"tower": str(tower_path), "sidecar": str(sidecar_path), "expected": files.sidecar}
        return data, f"wrote {tower_path} and {sidecar_path}"
