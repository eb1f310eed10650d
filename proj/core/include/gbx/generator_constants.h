// Copyright 2026 The gbx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/*
 * Workload generator constants, version 1.
 *
 * Plain C so device firmware can embed the identical generator. These values
 * are frozen: changing any of them changes every golden value and requires
 * bumping GBX_GENERATOR_VERSION.
 *
 * Generator: xorshift64* (Marsaglia xorshift with a multiplicative output
 * scramble, Vigna 2014). For state s != 0:
 *
 *     s ^= s >> 12;  s ^= s << 25;  s ^= s >> 27;   (state step, bijective)
 *     out = s * 0x2545F4914F6CDD1D                  (output, mod 2^64)
 *
 * The workload returns the output of step N. A simulated timing error XORs
 * one bit into s after the state step of the chosen iteration, before that
 * iteration's output is formed.
 */
#ifndef GBX_GENERATOR_CONSTANTS_H_
#define GBX_GENERATOR_CONSTANTS_H_

#define GBX_GENERATOR_VERSION 1

#define GBX_XORSHIFT_SHIFT_A 12
#define GBX_XORSHIFT_SHIFT_B 25
#define GBX_XORSHIFT_SHIFT_C 27
#define GBX_XORSHIFT_MULTIPLIER 0x2545F4914F6CDD1DULL

/* Cluster cycles per generated item; 50K items at 200 MHz take 35 ms. */
#define GBX_DEFAULT_CYCLES_PER_ITEM 140

#endif /* GBX_GENERATOR_CONSTANTS_H_ */
