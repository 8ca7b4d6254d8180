"""
命令模块
包含各种CLI命令的实现
"""

from typing import Any, Dict, List, Optional

import typer
from rich.console import Console
from rich.table import Table

from .config import config_manager
from .utils import (
    display_error,
    display_info,
    display_success,
    display_warning,
    get_current_working_directory,
    setup_logger,
)

console = Console()
app = typer.Typer(help="GCQ CLI - 图复形、量子化权重与分层多面体的计算工具")


def _manager():
    from .core.manager import JobManager

    return JobManager(config_manager.load_config(), get_current_working_directory())


def _options(**values: Any) -> Dict[str, Any]:
    """去掉未给出的选项，未给出的由作业从配置中取默认值"""
    return {k: v for k, v in values.items() if v is not None}


def _run_job(job_name: str, **params: Any) -> Dict[str, Any]:
    result = _manager().execute_job(job_name, **params)
    if result.get("success"):
        display_success(result.get("message", "作业完成"))
        if "output" in result:
            display_info("输出文件", result["output"])
        return result

    display_error(f"作业失败: {result.get('error', '未知错误')}")
    if "available_jobs" in result:
        display_info("可用作业", ", ".join(result["available_jobs"]))
    if "output" in result:
        display_info("输出文件", result["output"])
    raise typer.Exit(result.get("exit_code", 1))


@app.command()
def version():
    """显示版本信息"""
    from . import __version__

    display_info("版本信息", f"GCQ CLI v{__version__}")


@app.command()
def info():
    """显示支持的子复形及当前资源上限"""
    from .gcomplex import FlavorSpec, Subcomplex

    cfg = config_manager.load_config()

    table = Table(title="图复形子复形")
    table.add_column("子复形", style="cyan")
    table.add_column("过滤器", style="green")
    for subcomplex in Subcomplex:
        names = sorted(f.value for f in FlavorSpec(2, subcomplex).filters.names)
        table.add_row(subcomplex.value, ", ".join(names) or "无")
    console.print(table)

    display_info(
        "资源上限",
        f"max_vertices = {cfg.max_vertices}\nmax_search_space = {cfg.max_search_space}\n"
        f"工作目录: {get_current_working_directory()}",
    )


@app.command()
def config(
    action: str = typer.Argument(..., help="配置操作: show, init, global, local"),
    key: str = typer.Option(None, "--key", "-k", help="配置键"),
    value: str = typer.Option(None, "--value", "-v", help="配置值"),
):
    """配置管理"""

    if action == "show":
        config_manager.show_config(config_manager.load_config())

    elif action == "init":
        config_manager.create_default_configs()
        display_success("配置文件已创建")

    elif action in ("global", "local"):
        if not (key and value):
            display_error(f"设置{'全局' if action == 'global' else '本地'}配置需要提供 --key 和 --value 参数")
            raise typer.Exit(1)
        try:
            converted = config_manager.convert_value(key, value)
        except ValueError as e:
            display_error(f"配置值类型错误: {e}")
            raise typer.Exit(1)
        if converted is None:
            display_error(f"未知的配置键: {key}")
            raise typer.Exit(1)

        current = config_manager.load_config()
        try:
            updated = current.model_validate({**current.model_dump(), key: converted})
        except ValueError as e:
            display_error(f"配置值无效: {e}")
            raise typer.Exit(1)
        if action == "global":
            config_manager.save_global_config(updated)
            display_success(f"全局配置已更新: {key} = {converted}")
        else:
            config_manager.save_local_config(updated)
            display_success(f"本地配置已更新: {key} = {converted}")

    else:
        display_error(f"未知的配置操作: {action}")
        raise typer.Exit(1)


@app.command()
def jobs():
    """显示可用作业"""
    jobs_info = _manager().list_jobs()

    if not jobs_info:
        display_warning("没有找到可用的作业")
        return

    table = Table(title="可用作业")
    table.add_column("作业名称", style="cyan")
    table.add_column("描述", style="green")
    table.add_column("随机", style="yellow")
    table.add_column("配置键", style="blue")

    for job in jobs_info:
        table.add_row(job["name"], job["description"], "是" if job["stochastic"] else "否", ", ".join(job["config_keys"]))

    console.print(table)

    display_info("使用示例", """
    gcq basis GC_or_2 4 5
    gcq mc-solve GC_or_2 --max-vertices 6
    gcq polytope K 3 2
    gcq weights graphs.txt --space halfplane --samples 1000000
    gcq run basis --param flavor=dfGC_3 --param k=2 --param l=1 --param labeled=true
    """)


def _parse_params(items: List[str]) -> Dict[str, Any]:
    params: Dict[str, Any] = {}
    for item in items:
        if "=" not in item:
            raise typer.BadParameter(f"参数格式应为 key=value: {item}")
        key, raw = item.split("=", 1)
        lowered = raw.lower()
        if lowered in ("true", "false"):
            params[key] = lowered == "true"
            continue
        for cast in (int, float):
            try:
                params[key] = cast(raw)
                break
            except ValueError:
                continue
        else:
            params[key] = raw
    return params


@app.command()
def run(
    job: str = typer.Argument(..., help="作业名称"),
    param: List[str] = typer.Option([], "--param", "-p", help="作业参数 key=value，可重复"),
):
    """按名称运行任意作业"""
    _run_job(job, **_parse_params(param))


@app.command()
def basis(
    flavor: str = typer.Argument(..., help="子复形，例如 GC_or_2、dfGC_3"),
    k: int = typer.Argument(..., help="顶点数"),
    l: int = typer.Argument(..., help="边数"),
    filters: Optional[str] = typer.Option(None, "--filters", "-f", help="附加过滤器（逗号分隔）"),
    labeled: bool = typer.Option(False, "--labeled", help="输出全部带标号的图而不是规范类"),
    out: Optional[str] = typer.Option(None, "--out", "-o", help="输出目录"),
):
    """枚举图复形的基"""
    result = _run_job("basis", **_options(flavor=flavor, k=k, l=l, filters=filters, labeled=labeled, out=out))
    display_info("统计", f"基元素: {result['count']} 个，过滤器: {result['filters']}")


@app.command("mc-solve")
def mc_solve(
    flavor: str = typer.Argument(..., help="子复形，例如 GC_or_2"),
    max_vertices: Optional[int] = typer.Option(None, "--max-vertices", help="最高阶（默认取配置）"),
    out: Optional[str] = typer.Option(None, "--out", "-o", help="输出目录"),
):
    """逐阶求解 Maurer-Cartan 元素"""
    result = _run_job("mc_solve", **_options(flavor=flavor, max_vertices=max_vertices, out=out))

    table = Table(title="Maurer-Cartan 元素")
    table.add_column("阶", style="cyan")
    table.add_column("项数", style="green")
    for order, count in sorted(result["terms"].items()):
        table.add_row(str(order), str(count))
    console.print(table)
    if not result["defect_zero"]:
        display_warning("截断范围内缺陷不为零，详见输出文件")


@app.command()
def polytope(
    family: str = typer.Argument(..., help="族: K（双结合）、P（双置换）或 A（结合多面体）"),
    m: int = typer.Argument(..., help="T↓ 的叶子数"),
    n: int = typer.Argument(..., help="T↑ 的叶子数"),
    check: bool = typer.Option(False, "--check", help="同时做菱形性质检查"),
    out: Optional[str] = typer.Option(None, "--out", "-o", help="输出目录"),
):
    """枚举分层偏序集并写出 f 向量"""
    result = _run_job("polytope", **_options(family=family, m=m, n=n, check=check or None, out=out))
    if "diamond" in result:
        (display_success if result["diamond"] else display_warning)(f"菱形性质: {'通过' if result['diamond'] else '失败'}")


@app.command()
def weights(
    graph_file: str = typer.Argument(..., help="图编码文件（每行一个图）"),
    space: str = typer.Option("rd", "--space", help="积分空间: rd、halfplane 或 H"),
    d: Optional[int] = typer.Option(None, "--d", help="ℝ^d 的维数（rd 空间）"),
    samples: Optional[int] = typer.Option(None, "--samples", help="样本数"),
    seed: Optional[int] = typer.Option(None, "--seed", help="随机种子"),
    workers: Optional[int] = typer.Option(None, "--workers", help="采样线程数"),
    theta0: Optional[float] = typer.Option(None, "--theta0", help="凸起函数支撑边距 θ₀"),
    out: Optional[str] = typer.Option(None, "--out", "-o", help="输出目录"),
):
    """蒙特卡洛估计图权重"""
    result = _run_job(
        "weights",
        **_options(
            graph_file=graph_file, space=space, d=d, samples=samples, seed=seed, workers=workers, theta0=theta0, out=out
        ),
    )

    table = Table(title="权重")
    table.add_column("图", style="cyan")
    table.add_column("均值", style="green")
    table.add_column("标准误差", style="yellow")
    for row in result["rows"]:
        mean = "0（精确）" if row["exact"] else f"{row['mean']:.6f}"
        table.add_row(row["graph"], mean, f"{row['stderr']:.2e}")
    console.print(table)


@app.command()
def verify(
    scale: str = typer.Option("quick", "--scale", help="quick 或 full"),
    seed: Optional[int] = typer.Option(None, "--seed", help="随机种子"),
    workers: Optional[int] = typer.Option(None, "--workers", help="采样线程数"),
    theta0: Optional[float] = typer.Option(None, "--theta0", help="凸起函数支撑边距 θ₀"),
    out: Optional[str] = typer.Option(None, "--out", "-o", help="输出目录"),
):
    """运行验收检查"""
    manager = _manager()
    result = manager.execute_job("verify", **_options(scale=scale, seed=seed, workers=workers, theta0=theta0, out=out))

    table = Table(title=f"验收报告（{scale}）")
    table.add_column("检查", style="cyan")
    table.add_column("结果", style="green")
    table.add_column("详情", style="yellow")
    for row in result.get("checks", []):
        table.add_row(row["check"], "✅ 通过" if row["passed"] else "❌ 失败", row["detail"])
    console.print(table)

    if result.get("success"):
        display_success(result["message"])
        return
    display_error(result.get("error", "验收失败"))
    raise typer.Exit(result.get("exit_code", 2))


@app.callback()
def main(
    log_level: Optional[str] = typer.Option(None, "--log-level", help="日志级别（默认取配置）"),
):
    """GCQ CLI - 图复形、量子化权重与分层多面体的计算工具"""
    settings = config_manager.load_config()
    level = log_level or ("DEBUG" if settings.debug else settings.log_level)
    setup_logger(level=level)
