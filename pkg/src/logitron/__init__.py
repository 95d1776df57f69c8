"""Linear classification with the extended-logistic (Logitron) loss family."""

from .bench import (
    BenchReport,
    BenchTask,
    DESK_DWN_REFERENCE,
    ModelEntry,
    friedman_mean_ranks,
    racc,
    run_benchmark,
)
from .classifier import (
    BinaryClassifier,
    OvaClassifier,
    accuracy_percent,
    load_model,
    predict_margin,
    predict_ova,
    save_model,
    train_binary,
    train_ova,
)
from .dataio import (
    Dataset,
    StandardizationStats,
    apply_standardizer,
    fit_standardizer,
    load_csv,
    split_train_test,
    write_csv,
)
from .extmath import ExtParams, boundary, ext_exp, ext_exp_clipped, ext_log
from .loss import (
    Family,
    LossEval,
    LossSpec,
    evaluate,
    extended_logistic,
    hinge_q,
    logitron_grad,
    logitron_second,
    logitron_value,
    logitron_value_reformulated,
    perceptron,
    resolve_spec,
)
from .modelsel import (
    GridConfig,
    CVResult,
    all_grid_specs,
    grid_search,
    kfold_split,
    submodel_grid,
)
from .optim import (
    LinearModel,
    Objective,
    SolveReport,
    SolverSettings,
    minimize,
    objective_eval,
)

__version__ = "0.1.0"
