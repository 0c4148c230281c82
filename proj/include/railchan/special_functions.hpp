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

#ifndef RAILCHAN_SPECIAL_FUNCTIONS_HPP
#define RAILCHAN_SPECIAL_FUNCTIONS_HPP

#include <complex>

namespace railchan
{

using cdouble = std::complex<double>;

// Complementary error function for complex arguments with Re(z) >= 0.
// Power series for |z| < 2.5, Lentz continued fraction otherwise.
cdouble erfc_complex(cdouble z);

// Fresnel tail integral  int_u^inf exp(-j*pi*t^2/2) dt  for real u.
cdouble fresnel_tail(double u);

// Kouyoumjian-Pathak transition function
//   F(x) = 2j sqrt(x) exp(jx) int_sqrt(x)^inf exp(-j tau^2) dtau,  x >= 0.
cdouble utd_transition(double x);

} // namespace railchan

#endif
