#pragma once

#include <vector>

namespace forl::oracles {

struct WelchCase {
    std::vector<double> a, b;
    double t, dof, p;
};

// Reference values from tests/oracles/welch_oracle.py (mpmath, 50 digits).
inline const std::vector<WelchCase> kWelchCases = {
    {{3.712, 2.189, 0.057}, {0.341, -2.126, 2.964}, 0.879153175067426, 3.63771355317659, 0.433546131662016},
    {{3.66, -1.211, -2.048, 1.98, 3.306}, {3.093, 6.21, 10.588, 1.946, 5.069, 4.46, 1.308, -2.169},
     -1.50703476487228, 10.7618355873378, 0.160580419032321},
    {{1.608, -4.671, -2.506, 1.216, -4.454, -3.565, -4.578, -1.022, -1.122, -1.538}, {-0.248, -5.567, 0.952, -0.74},
     -0.411973303027244, 4.64658985988898, 0.698668778304845},
    {{2.117, 7.598}, {0.967, -1.696}, 1.71390700458164, 1.44720037833222, 0.27364416678146},
    {{2.521, -0.116, 0.776, 0.957, 2.312, -0.762, 1.34, 0.78, 1.15, 0.694, -0.014, 0.918},
     {0.173, -0.762, -0.04, -0.289, 0.253, -0.246, -0.827, -0.792, -0.523, 0.469, -0.662, 0.266, -0.195, -0.357, -0.328,
      -0.499, -0.033, -0.091, -0.114, -0.459, -0.079, -0.288, -0.161, -0.122, -0.283, -0.108, -0.253, -0.004, -0.872,
      -0.094},
     4.07083001024708, 12.1165345810262, 0.00152163043651992},
    {{2.03, 2.632, -2.757, -3.688, -2.645, -0.875, 1.482}, {-2.225, -0.626, -2.394, -1.808, -0.504, -1.06, -0.764},
     0.777305643254092, 7.10660434017426, 0.462064772543782},
    {{0.977, 1.724, 0.928, -0.106},
     {-0.627, 1.119, 3.314, 5.882, 6.915, 2.816, 1.855, 3.485, -3.301, 1.593, -0.062, 5.349, 3.416, 3.976, 5.637, 0.572,
      4.113, -1.092, 4.12, 1.749},
     -2.39394969922195, 18.1774720460331, 0.0276531929714472},
    {{0.736, 1.088, 1.982, 1.797, 2.466, 2.506, 1.965, 3.093, 2.226, 0.736, 1.765, -0.463, 0.488,
      2.581, 0.537, 2.322, 2.373, 0.28, 1.669, 1.188, -0.822, 3.633, 2.729, 1.528, 0.009},
     {2.177, 1.894, 2.936, 0.574, 2.741, -0.483},
     -0.175374365137355, 6.82877900995234, 0.865872013721159},
    {{-1.715, -0.853, 0.044}, {-0.311, -0.992, 1.507, -0.366, 1.934, 0.388, -2.268, 0.298, -3.549}, -0.609156350554689,
     7.40674314531398, 0.560634620999058},
    {{0.426, 2.102, 3.756, 0.757, 2.643, -3.528, 2.564, 0.025, -1.117, 0.889, -0.17, -1.465, 0.318,
      3.324, 5.171, 2.422, 1.755, 2.486, 1.371, 0.916, -1.066, 3.781, 2.596, -0.913, 2.464, 5.594,
      1.556, -0.324, -2.147, -0.851, 3.516, -0.345, 1.347, 5.438, -0.764, 0.109, 1.994, 4.496, 0.873,
      -2.055, 2.652, 1.745, -0.464, -2.0, 3.469, -1.028, 2.765, -1.423, 2.913, 7.605},
     {2.578, 2.036, 1.519, 1.299, 2.052, 1.422, 5.251, 3.115, 2.425, 2.783, 0.843, -2.538, 4.453, 0.106,
      2.495, 5.039, 5.683, -1.795, 2.3, 1.082, 0.555, 2.469, 1.158, 3.176, 2.993, 4.391, 0.249, 3.446,
      6.383, 2.067, -1.186, 1.471, 2.321, 1.057, 0.509, -0.623, 4.06, 4.023, -0.445, 5.112},
     -1.75908334600895, 87.1002297770943, 0.0820751740943207},
};

}  // namespace forl::oracles
