"""
Module du contrôleur de la ligne de commande.
Interprète les sous-commandes, construit la configuration et délègue les
calculs aux modèles puis l'affichage à la vue.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence

from ..analysis.census import census
from ..analysis.exact import expected_fringe_count, expected_nonfringe_count, pmin, second_factorial_nonfringe
from ..analysis.oracle import exact_count_pmf
from ..analysis.thresholds import predict_K
from ..experiments.runner import (
    run_heights,
    run_Kn,
    run_nonfringe_concentration,
    run_poisson_regimes,
    run_size_class,
)
from ..experiments.summary import ExperimentSummary
from ..models.offspring import OffspringDistribution, constants, parse_distribution
from ..models.tree import PlaneTree, format_tree, parse_tree
from ..sampler.seeding import SeededRNG
from ..sampler.tree_sampler import SampleConfig, TreeSampler
from ..utils import data_manager
from ..utils.config_manager import CampaignConfig, ConfigManager
from ..utils.enums import CountMode, ExperimentKind, KRegime
from ..utils.errors import EXIT_OK, ConfigError, GWForestError, exit_code_for
from ..utils.logger import get_logger, setup_logging
from ..views.report_writer import ReportWriter

logger = get_logger("CLI")

PROGRAM_NAME: str = "gwforest"
EXACT_ACTIONS = ("moments", "pmin", "predict-k", "constants")
EXACT_QUANTITIES = ("mean", "var", "fm2")


def _modes(value: str) -> List[CountMode]:
    if value == "both":
        return [CountMode.FRINGE, CountMode.NONFRINGE]
    return [CountMode(value)]


class CLIController:
    """
    Contrôleur de la commande gwforest.

    Attributes:
        writer: Vue chargée des sorties
        config: Configuration résolue (fichier, environnement, options)
    """

    def __init__(self, writer: Optional[ReportWriter] = None) -> None:
        self.writer: ReportWriter = writer or ReportWriter()
        self.config: Optional[ConfigManager] = None
        self._commands: Dict[str, Callable[[argparse.Namespace], int]] = {
            "sample": self.cmd_sample,
            "census": self.cmd_census,
            "exact": self.cmd_exact,
            "oracle": self.cmd_oracle,
            "experiment": self.cmd_experiment,
        }

    # === Analyse des arguments ===

    @staticmethod
    def build_parser() -> argparse.ArgumentParser:
        common = argparse.ArgumentParser(add_help=False)
        common.add_argument("--config", default="config.json", help="fichier de configuration JSON")
        common.add_argument("--seed", type=int, help="graine maîtresse")
        common.add_argument("--workers", type=int, help="nombre de processus")
        common.add_argument("--max-rejections", type=int, help="plafond d'essais du rejet")
        common.add_argument("--tail-epsilon", type=float, help="masse de queue abandonnée (lois non bornées)")
        common.add_argument("--log-level", help="DEBUG, INFO, WARNING ou ERROR")
        common.add_argument("-v", "--verbose", action="store_true", help="équivaut à --log-level DEBUG")

        dist = argparse.ArgumentParser(add_help=False)
        dist.add_argument("--dist", help="loi : plane, full-binary, motzkin, d-ary, labeled, discrete-gaussian(c) ou 'i:p,...'")
        dist.add_argument("--d", type=int, help="arité de la loi d-ary")

        parser = argparse.ArgumentParser(prog=PROGRAM_NAME, description="Arbres de Galton-Watson conditionnés")
        sub = parser.add_subparsers(dest="command", required=True)

        sample = sub.add_parser("sample", parents=[common, dist], help="tirer des arbres 𝒯_n")
        sample.add_argument("--n", type=int, required=True)
        sample.add_argument("--count", type=int, default=1)
        sample.add_argument("--out", help="fichier de sortie (stdout par défaut)")

        census_parser = sub.add_parser("census", parents=[common, dist], help="recenser les sous-arbres d'hôtes")
        census_parser.add_argument("--in", dest="input", required=True, help="fichier d'arbres ('-' = stdin)")
        census_parser.add_argument("--pattern", action="append", default=[], help="motif (répétable)")
        census_parser.add_argument("--mode", choices=["fringe", "nonfringe", "both"], default="fringe")
        census_parser.add_argument("--r", type=int, help="arité des hauteurs H_r et H̃_r")
        census_parser.add_argument("--kcap", type=int, help="plafond de K_n (K non calculé si absent)")
        census_parser.add_argument("--sizes", type=int, help="ajoute N_S_k pour k ≤ SIZES")
        census_parser.add_argument("--out", help="CSV de sortie (stdout par défaut)")

        exact = sub.add_parser("exact", parents=[common, dist], help="quantités exactes")
        exact.add_argument("action", nargs="?", choices=EXACT_ACTIONS, default="moments")
        exact.add_argument("--n", type=int)
        exact.add_argument("--k", type=int)
        exact.add_argument("--pattern")
        exact.add_argument("--mode", choices=["fringe", "nonfringe"], default="fringe")
        exact.add_argument("--what", default="mean", help="liste parmi mean,var,fm2")
        exact.add_argument("--regime", choices=[regime.value for regime in KRegime])
        exact.add_argument("--gamma", type=float)
        exact.add_argument("--alpha", type=float, default=1.0)
        exact.add_argument("--beta", type=float, default=0.0)
        exact.add_argument("--kmax", type=int, default=200, help="indices L_k calculés (constants)")
        exact.add_argument("--out")

        oracle = sub.add_parser("oracle", parents=[common, dist], help="loi exacte par énumération (n ≤ 12)")
        oracle.add_argument("--n", type=int, required=True)
        oracle.add_argument("--pattern", required=True)
        oracle.add_argument("--mode", choices=["fringe", "nonfringe"], default="fringe")
        oracle.add_argument("--out")

        experiment = sub.add_parser("experiment", parents=[common, dist], help="campagne Monte Carlo")
        experiment.add_argument("--kind", choices=[kind.value for kind in ExperimentKind])
        experiment.add_argument("--campaign", help="campagne nommée de config.json")
        experiment.add_argument("--n", type=int, nargs="+")
        experiment.add_argument("--pattern", help="règle de motif, ex. chain:ceil(0.5*log2(n)+0.5)")
        experiment.add_argument("--r", type=int)
        experiment.add_argument("--mode", nargs="+", choices=["fringe", "nonfringe"])
        experiment.add_argument("--replicates", type=int)
        experiment.add_argument("--kcap", type=int)
        experiment.add_argument("--csv", help="CSV des lignes (stdout par défaut)")
        experiment.add_argument("--json", help="résumé JSON complet")
        return parser

    # === Exécution ===

    def run(self, argv: Optional[Sequence[str]] = None) -> int:
        """
        Exécute une commande.

        Returns:
            Code de sortie : 0 succès, 2 entrée invalide, 3 échantillonneur épuisé
        """
        parser = self.build_parser()
        try:
            args = parser.parse_args(argv)
        except SystemExit as e:
            return int(e.code or 0)

        try:
            self.config = self._resolve_config(args)
            setup_logging(self.config.log_level)
            return self._commands[args.command](args)
        except (GWForestError, ValueError) as e:
            setup_logging()
            logger.error(f"❌ {e}")
            return exit_code_for(e)

    def _resolve_config(self, args: argparse.Namespace) -> ConfigManager:
        config = ConfigManager(args.config)
        config.update(
            {
                "seed": args.seed,
                "workers": args.workers,
                "max_rejections": args.max_rejections,
                "tail_epsilon": args.tail_epsilon,
                "log_level": "DEBUG" if args.verbose else args.log_level,
                "k_cap": getattr(args, "kcap", None),
            }
        )
        return config

    def _distribution(self, text: Optional[str], d: Optional[int]) -> OffspringDistribution:
        if not text:
            raise ConfigError("--dist est requis pour cette commande")
        return parse_distribution(text, d=d, tail_epsilon=self.config.tail_epsilon)

    @staticmethod
    def _require(value: Any, flag: str) -> Any:
        if value is None:
            raise ConfigError(f"{flag} est requis pour cette commande")
        return value

    # === Sous-commandes ===

    def cmd_sample(self, args: argparse.Namespace) -> int:
        """Tire --count arbres 𝒯_n, un par ligne."""
        dist = self._distribution(args.dist, args.d)
        if args.count < 1:
            raise ConfigError("--count doit être ≥ 1")
        sample_config = SampleConfig(n=args.n, max_rejections=self.config.max_rejections, seed=self.config.seed)
        sampler = TreeSampler(dist, sample_config, SeededRNG(self.config.seed))
        trees = list(sampler.stream(args.count))
        logger.info(f"{args.count} arbre(s) de taille {args.n}, taux d'acceptation {sampler.acceptance_rate:.3g}")
        if args.out:
            header = [f"dist={dist.name} n={args.n} count={args.count} seed={self.config.seed}"]
            if not data_manager.save_trees(trees, args.out, header):
                raise ConfigError(f"écriture de {args.out} impossible")
        else:
            self.writer.write_trees(trees)
        return EXIT_OK

    def _read_hosts(self, source: str) -> List[PlaneTree]:
        if source == "-":
            return data_manager.parse_tree_lines(sys.stdin, source="stdin")
        trees = data_manager.load_trees(source)
        if trees is None:
            raise ConfigError(f"fichier d'arbres introuvable : {source}")
        return trees

    def cmd_census(self, args: argparse.Namespace) -> int:
        """Une ou plusieurs lignes CSV par arbre hôte."""
        hosts = self._read_hosts(args.input)
        patterns = [parse_tree(text) for text in args.pattern]
        modes = _modes(args.mode)
        dist = self._distribution(args.dist, args.d) if args.dist else None
        if args.kcap is not None and dist is None:
            raise ConfigError("--kcap exige --dist")
        sizes = range(1, args.sizes + 1) if args.sizes else ()

        rows: List[Dict[str, Any]] = []
        for index, host in enumerate(hosts):
            report = census(
                host,
                patterns=patterns,
                modes=modes,
                size_classes=sizes,
                r_values=[args.r] if args.r is not None else [],
                dist=dist,
                k_cap=self.config.k_cap if args.kcap is not None else None,
            )
            if report.r_impossible:
                logger.warning(f"hôte {index} : p_r = 0 pour r ∈ {sorted(report.r_impossible)}, hauteurs nulles")
            rows.extend(self.writer.census_rows(index, report, patterns, modes, args.r))
        self.writer.write_census(rows, args.out)
        return EXIT_OK

    def cmd_exact(self, args: argparse.Namespace) -> int:
        dist = self._distribution(args.dist, args.d)
        if args.action == "moments":
            rows = [self._exact_moments(dist, args)]
        elif args.action == "pmin":
            k = self._require(args.k, "--k")
            result = pmin(dist, k)
            rows = [{
                "k": result.k,
                "tree": format_tree(result.tree),
                "probability": result.probability,
                "log_probability": result.log_probability,
                "root_k": result.root_k,
            }]
        elif args.action == "predict-k":
            n = self._require(args.n, "--n")
            prediction = predict_K(
                dist,
                n,
                regime=KRegime(args.regime) if args.regime else None,
                gamma=args.gamma,
                alpha=args.alpha,
                beta=args.beta,
            )
            if prediction.heuristic:
                logger.warning(f"régime choisi par heuristique (meilleur effort) : {prediction.regime.value}")
            rows = [{
                "n": n,
                "K": prediction.value,
                "regime": prediction.regime.value,
                "heuristic": int(prediction.heuristic),
                "detail": prediction.detail,
            }]
        else:
            consts = constants(dist, k_max=args.kmax)
            rows = [{
                "dist": dist.name,
                "mean": dist.mean,
                "sigma2": consts.sigma2,
                "span": consts.span,
                "p_max": consts.p_max,
                "L": consts.L,
                "kappa": consts.kappa,
                "L_argmin": consts.L_argmin,
                "L_truncated": int(consts.L_truncated),
                "truncated_mass": dist.truncated_mass,
            }]
        self.writer.write_csv(rows, args.out)
        return EXIT_OK

    def _exact_moments(self, dist: OffspringDistribution, args: argparse.Namespace) -> Dict[str, Any]:
        n = self._require(args.n, "--n")
        pattern = parse_tree(self._require(args.pattern, "--pattern"))
        what = [item.strip() for item in args.what.split(",") if item.strip()]
        unknown = sorted(set(what) - set(EXACT_QUANTITIES))
        if unknown:
            raise ConfigError(f"--what inconnu : {unknown} (attendu : {', '.join(EXACT_QUANTITIES)})")
        mode = CountMode(args.mode)
        row: Dict[str, Any] = {"n": n, "pattern": format_tree(pattern), "mode": mode.value}

        if mode is CountMode.FRINGE:
            if set(what) - {"mean"}:
                raise ConfigError("var et fm2 ne sont disponibles qu'en mode nonfringe")
            row["mean"] = expected_fringe_count(dist, n, pattern)
            return row
        if set(what) & {"var", "fm2"}:
            report = second_factorial_nonfringe(dist, n, pattern)
            row["mean"] = report.mean
            if "fm2" in what:
                row["fm2"] = report.second_factorial
            if "var" in what:
                row["var"] = report.variance
        else:
            row["mean"] = expected_nonfringe_count(dist, n, pattern)
        return row

    def cmd_oracle(self, args: argparse.Namespace) -> int:
        """Loi exacte du comptage puis moments, au format kind,key,value."""
        dist = self._distribution(args.dist, args.d)
        law = exact_count_pmf(dist, args.n, parse_tree(args.pattern), CountMode(args.mode))
        rows: List[Dict[str, Any]] = [{"kind": "pmf", "key": count, "value": p} for count, p in law.pmf.items()]
        for key in ("mean", "variance", "second_factorial", "reference_mean", "tv_to_poisson"):
            rows.append({"kind": "moment", "key": key, "value": getattr(law, key)})
        self.writer.write_csv(rows, args.out, ["kind", "key", "value"])
        return EXIT_OK

    def _campaign(self, args: argparse.Namespace) -> CampaignConfig:
        """Campagne nommée complétée par les options, ou campagne décrite par les options seules."""
        if args.campaign:
            base = self.config.get_campaign(args.campaign)
        else:
            kind = self._require(args.kind, "--kind")
            base = CampaignConfig(
                name="cli",
                kind=ExperimentKind(kind),
                dist=self._require(args.dist, "--dist"),
                n_values=self._require(args.n, "--n"),
                replicates=100,
            )
        return CampaignConfig(
            name=base.name,
            kind=ExperimentKind(args.kind) if args.kind else base.kind,
            dist=args.dist or base.dist,
            n_values=args.n or base.n_values,
            replicates=args.replicates if args.replicates is not None else base.replicates,
            pattern=args.pattern or base.pattern,
            r=args.r if args.r is not None else base.r,
            modes=[CountMode(mode) for mode in args.mode] if args.mode else base.modes,
            d=args.d if args.d is not None else base.d,
        )

    def cmd_experiment(self, args: argparse.Namespace) -> int:
        campaign = self._campaign(args)
        if campaign.replicates < 1:
            raise ConfigError("--replicates doit être ≥ 1")
        dist = self._distribution(campaign.dist, campaign.d)
        common = {
            "replicates": campaign.replicates,
            "seed": self.config.seed,
            "workers": self.config.workers,
            "max_rejections": self.config.max_rejections,
        }
        kind = campaign.kind
        if kind in (ExperimentKind.POISSON, ExperimentKind.SIZE_CLASS, ExperimentKind.NONFRINGE):
            rule = self._require(campaign.pattern, "--pattern")
            runner = {
                ExperimentKind.POISSON: run_poisson_regimes,
                ExperimentKind.SIZE_CLASS: run_size_class,
                ExperimentKind.NONFRINGE: run_nonfringe_concentration,
            }[kind]
            summary = runner(dist, campaign.n_values, rule, **common)
        elif kind is ExperimentKind.HEIGHTS:
            r = self._require(campaign.r, "--r")
            summary = run_heights(dist, campaign.n_values, r, campaign.modes, **common)
        else:
            summary = run_Kn(dist, campaign.n_values, k_cap=self.config.k_cap, **common)

        self._emit(summary, args)
        return EXIT_OK

    def _emit(self, summary: ExperimentSummary, args: argparse.Namespace) -> None:
        json_path = args.json
        if json_path and not os.path.isabs(json_path) and not os.path.dirname(json_path):
            json_path = os.path.join(self.config.output_dir, json_path)
        self.writer.write_summary(summary, args.csv, json_path)
        if args.csv:
            self.writer.print_summary(summary)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Point d'entrée de la commande gwforest."""
    return CLIController().run(argv)
