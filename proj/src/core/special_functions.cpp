// SPDX-License-Identifier: Apache-2.0
//
// railchan - dynamic ray-tracing channel simulator for train-to-infrastructure links
// Copyright (C) 2026 The railchan authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "railchan/special_functions.hpp"

#include "railchan/geometry.hpp"

#include <cmath>

namespace railchan
{

cdouble erfc_complex(cdouble z)
{
    const double sqrt_pi = std::sqrt(kPi);
    if (std::abs(z) < 2.5)
    {
        // erf(z) = 2/sqrt(pi) * sum (-1)^n z^(2n+1) / (n! (2n+1))
        const cdouble z2 = z * z;
        cdouble term = z, sum = z;
        for (int n = 1; n < 200; ++n)
        {
            term *= -z2 / static_cast<double>(n);
            const cdouble add = term / static_cast<double>(2 * n + 1);
            sum += add;
            if (std::abs(add) < 1e-17 * std::abs(sum))
                break;
        }
        return 1.0 - 2.0 / sqrt_pi * sum;
    }

    // erfc(z) = exp(-z^2)/sqrt(pi) * 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + 2/(z + ...)))))
    // evaluated with the modified Lentz algorithm.
    const double tiny = 1e-300;
    cdouble f = z, c = z, d = 0.0;
    for (int n = 1; n < 5000; ++n)
    {
        const double a = 0.5 * n;
        d = z + a * d;
        if (std::abs(d) < tiny)
            d = tiny;
        c = z + a / c;
        if (std::abs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        const cdouble delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16)
            break;
    }
    return std::exp(-z * z) / (sqrt_pi * f);
}

cdouble fresnel_tail(double u)
{
    // int_u^inf exp(-j pi t^2 / 2) dt = ((1 - j)/2) erfc(e^{j pi/4} sqrt(pi/2) u)  for u >= 0
    const cdouble half_1mj{0.5, -0.5};
    if (u >= 0.0)
    {
        const cdouble z = std::polar(std::sqrt(kPi / 2.0) * u, kPi / 4.0);
        return half_1mj * erfc_complex(z);
    }
    // int_{-inf}^{inf} = 1 - j
    return cdouble{1.0, -1.0} - fresnel_tail(-u);
}

cdouble utd_transition(double x)
{
    if (x <= 0.0)
        return 0.0;
    // int_sqrt(x)^inf exp(-j tau^2) dtau = sqrt(pi/2) * fresnel_tail(sqrt(2x/pi))
    const double s = std::sqrt(x);
    const cdouble integral = std::sqrt(kPi / 2.0) * fresnel_tail(std::sqrt(2.0 * x / kPi));
    return cdouble{0.0, 2.0} * s * std::polar(1.0, x) * integral;
}

} // namespace railchan
