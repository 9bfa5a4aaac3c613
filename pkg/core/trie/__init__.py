from core.trie.labels import (BitLabel, EPSILON, DEFAULT_LMAX, validate_label, is_prefix, is_proper_prefix, lcp,
                              msd_index, msd_length, msd_label, msd_missing, edge_between, first_step_between,
                              LengthLadder)
from core.trie.node import (HptNode, NodeKind, node_children_count, is_key2_node, is_leaf, parent_label, child_label,
                            child_labels, neighbour_labels, side_of)
from core.trie.ideal import IdealHpt, build_ideal_hpt
