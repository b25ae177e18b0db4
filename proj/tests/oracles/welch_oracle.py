# Regenerates the Welch and incomplete-beta reference values used by tests/oracles/welch_cases.hpp and eval_test.cpp.
# Requires mpmath; prints C++ initializer rows.
import mpmath as mp
mp.mp.dps = 50
import random
random.seed(20261015)
cases = []
sizes = [(3,3),(5,8),(10,4),(2,2),(12,30),(7,7),(4,20),(25,6),(3,9),(50,40)]
for i,(na,nb) in enumerate(sizes):
    mu_a = random.uniform(-2,2); mu_b = mu_a + random.uniform(-1.5,1.5)
    sa = random.uniform(0.2,3); sb = random.uniform(0.2,3)
    a = [round(random.gauss(mu_a, sa), 3) for _ in range(na)]
    b = [round(random.gauss(mu_b, sb), 3) for _ in range(nb)]
    A=[mp.mpf(str(x)) for x in a]; B=[mp.mpf(str(x)) for x in b]
    ma=sum(A)/na; mb=sum(B)/nb
    va=sum((x-ma)**2 for x in A)/(na-1)/na; vb=sum((x-mb)**2 for x in B)/(nb-1)/nb
    t=(ma-mb)/mp.sqrt(va+vb)
    dof=(va+vb)**2/(va**2/(na-1)+vb**2/(nb-1))
    p = 2*(1-mp.quad(lambda x: mp.gamma((dof+1)/2)/(mp.sqrt(dof*mp.pi)*mp.gamma(dof/2))*(1+x*x/dof)**(-(dof+1)/2), [-mp.inf, abs(t)]))
    p2 = mp.betainc(dof/2, mp.mpf(1)/2, 0, dof/(dof+t*t), regularized=True)
    assert abs(p-p2) < 1e-20, (p,p2)
    cases.append((a,b,t,dof,p2))
for a,b,t,dof,p in cases:
    print("    {{%s}, {%s}, %s, %s, %s}," % (", ".join(map(str,a)), ", ".join(map(str,b)), mp.nstr(t,15), mp.nstr(dof,15), mp.nstr(p,15)))
print("beta")
for (a,b,x) in [(0.5,0.5,0.3),(2,3,0.4),(10,0.5,0.9),(0.5,10,0.05),(30,40,0.45),(1,1,0.77)]:
    print("    {%s, %s, %s, %s}," % (a,b,x, mp.nstr(mp.betainc(a,b,0,x,regularized=True),17)))
