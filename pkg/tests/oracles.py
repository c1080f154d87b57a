"""Frozen reference values from sources independent of airykit.

Airy values and the integrals below were computed once with mpmath at 40
digits (mpmath.airyai and mpmath.quad on the lambda-integral forms).  The
Tracy-Widom moments are the standard published high-precision values.
"""
import math

AI_0 = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)
AIP_0 = -(3.0 ** (-1.0 / 3.0)) / math.gamma(1.0 / 3.0)

AIRY = {
    -30.0: (-0.087968188456842162833, 1.2286206026374851347),
    -10.0: (0.040241238486443190689, 0.9962650441327900559),
    -3.0: (-0.37881429367765807435, 0.31458376921659881365),
    -1.0: (0.5355608832923521188, -0.010160567116645209395),
    0.0: (0.35502805388781723926, -0.25881940379280679841),
    0.5: (0.23169360648083348977, -0.22491053266468389314),
    1.0: (0.13529241631288141552, -0.15914744129679321279),
    3.0: (0.0065911393574607191443, -0.011912976705951318474),
    5.0: (0.00010834442813607441735, -0.000247413890868462476),
    10.0: (1.1047532552898685934e-10, -3.5206336767389236366e-10),
    30.0: (3.2082175915504955711e-49, -1.7598765814327259821e-48),
}

KAI_0_1 = 0.021485503837037954846          # int_0^oo Ai(l) Ai(1 + l) dl
KAI_0_0 = 0.066987483779663974144          # Ai'(0)^2
CONV_00 = 0.2817859531098718485            # 2^{-1/3} Ai(0)
EXPH_KAI_1_00 = 0.045446852823491519807    # int_0^oo e^{-l} Ai(l)^2 dl
HEAT_B0_02_00 = 0.34652220837379040079     # e^{0.2 Delta} B_0 at (0, 0)
AI2_INT_0 = 0.066987483779663974144        # int_0^oo Ai^2
AI2_QUADRANT = 0.030629383078988447195     # int int_{x,y>0} Ai(x+y)^2

TW2_MEAN, TW2_VAR = -1.7710868074116, 0.8131947928329
TW1_MEAN, TW1_VAR = -1.2065335745820, 1.6077810345810
