# Decimal literals carried beyond double-double precision. They are converted
# exactly (via Fraction) and rounded once into hi + lo.
PI = "3.14159265358979323846264338327950288419716939937510"
LN2 = "0.69314718055994530941723212145817656807550013436026"
EULER_GAMMA = "0.57721566490153286060651209008240243104215933593992"
GAMMA_ONE_THIRD = "2.67893853470774763365569294097467764412868937795730"
