from lindleywalk.experiments.experiment_classify import register_classify_experiment
from lindleywalk.experiments.experiment_doney import register_doney_experiment
from lindleywalk.experiments.experiment_duality import register_duality_experiment
from lindleywalk.experiments.experiment_harmonic import register_harmonic_experiment
from lindleywalk.experiments.experiment_lyapunov import register_lyapunov_experiment
from lindleywalk.experiments.experiment_occupation import register_occupation_experiment
from lindleywalk.experiments.experiment_reflection import register_reflection_experiment
from lindleywalk.experiments.experiment_tail import register_tail_experiment


def register_all_experiments():
    register_classify_experiment()
    register_tail_experiment()
    register_harmonic_experiment()
    register_lyapunov_experiment()
    register_duality_experiment()
    register_occupation_experiment()
    register_reflection_experiment()
    register_doney_experiment()
