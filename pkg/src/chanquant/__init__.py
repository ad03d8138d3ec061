"""Upgrading and degrading finite channels to a prescribed output alphabet size.

Binary-input channels are handled by greedy splitting (upgrade) and greedy
merging (degrade); larger input alphabets go through the one-hot reduction
to q-1 binary sub-problems. All information quantities are in nats.
"""
from ._kernels import BACKEND
from .binary_degrade import DegradeOutcome, apply_quantizer, greedy_merge, merge_cost
from .binary_upgrade import UpgradeOutcome, final_beta_map, greedy_split, split_alpha, split_cost
from .bounds import (
    BoundReport,
    bound,
    brute_force_delta_I,
    concavity_gap,
    dp_optimal_degrade,
    lemma_bound,
    sphere_packing_witness,
    sup_gap,
)
from .channels import GeneratorSpec, hard_grid_channel, named_channel, random_channel
from .dist import (
    BinaryPosteriorChannel,
    JointDistribution,
    binary_entropy,
    binary_kl,
    conditional_entropy,
    entropy,
    make_joint,
    mutual_information,
    read_channel,
    to_binary_view,
    write_channel,
)
from .errors import ChannelError
from .onehot import AlphaChain, build_alpha_chain, lambda_of, one_hot
from .onehot_degrade import OneHotDegradeResult, degrade
from .onehot_upgrade import OneHotUpgradeResult, assemble_pstar, upgrade, verify_upgrade_consistency

__version__ = "0.1.0"
