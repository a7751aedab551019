#pragma once
// Chebyshev coefficients of g_nu(t) = exp(x) sqrt(x) K_nu(x) with x = 4 / (1 + t),
// t in [-1, 1] (i.e. x >= 2). The series is  c0/2 + sum_{k>=1} c_k T_k(t).
// Generated at 40 significant digits from 80 Chebyshev-Gauss nodes; the tail
// beyond the last entry is below 1e-19.

#include <array>

namespace vortexlab::detail {

inline constexpr std::array<double, 28> k0_cheb = {
    2.44030308206595547560e+00, -3.14481013119645019804e-02, 1.56988388573005331963e-03,
    -1.28495495816278017340e-04, 1.39498137188765002054e-05, -1.83175552271911953169e-06,
    2.76681363944501486093e-07, -4.66048989768794783302e-08, 8.57403401741422527098e-09,
    -1.69753450938906141888e-09, 3.57739728140032832431e-10, -7.95748924447739647906e-11,
    1.85594911495492644889e-11, -4.51459788337451925245e-12, 1.14034058820734413572e-12,
    -2.98009692314817841985e-13, 8.03289077506837463424e-14, -2.22751332674629646893e-14,
    6.34007647627664605718e-15, -1.84859337792090710149e-15, 5.51205599940433350344e-16,
    -1.67823112575490059295e-16, 5.21039177764355431656e-17, -1.64758059398426321219e-17,
    5.30043377117733540342e-18, -1.73317120058210010707e-18, 5.75510920288272905083e-19,
    -1.93909560531835554690e-19};

inline constexpr std::array<double, 28> k1_cheb = {
    2.72062619048444265246e+00, 1.03923736576817235533e-01, -2.85781685962277921115e-03,
    1.95215518471351619830e-04, -1.93619797416608300817e-05, 2.40648494783721698524e-06,
    -3.50196060308781255723e-07, 5.74108412545004947244e-08, -1.03457624656780967915e-08,
    2.01504975519703465939e-09, -4.19035475934192541845e-10, 9.21831518760531460414e-11,
    -2.12996783842779092206e-11, 5.13963967348234320830e-12, -1.28917396094982285376e-12,
    3.34841966605224312098e-13, -8.97670518201014628865e-14, 2.47715442421959878246e-14,
    -7.01983708921476847210e-15, 2.03870316623986096527e-15, -6.05704727064301766321e-16,
    1.83809357524304548385e-16, -5.68946284919364841076e-17, 1.79405104788635718112e-17,
    -5.75674448207330252006e-18, 1.87786519016232677304e-18, -6.22164528735260964646e-19,
    2.09191252698311363270e-19};

}  // namespace vortexlab::detail
