"""Results store: experiment runs and measurement samples"""
from alembic import op
import sqlalchemy as sa


revision = '001'
down_revision = None
branch_labels = None
depends_on = None


def upgrade() -> None:
    op.create_table('experiment_runs',
    sa.Column('id', sa.Integer(), nullable=False),
    sa.Column('command', sa.String(length=50), nullable=False),
    sa.Column('signature', sa.String(length=20), nullable=False),
    sa.Column('seed', sa.Integer(), nullable=True),
    sa.Column('parameters', sa.Text(), nullable=False),
    sa.Column('status', sa.String(length=20), nullable=False),
    sa.Column('summary', sa.Text(), nullable=True),
    sa.Column('created_at', sa.DateTime(), nullable=True),
    sa.PrimaryKeyConstraint('id')
    )
    op.create_index(op.f('ix_experiment_runs_id'), 'experiment_runs', ['id'], unique=False)
    op.create_index(op.f('ix_experiment_runs_command'), 'experiment_runs', ['command'], unique=False)
    op.create_index(op.f('ix_experiment_runs_signature'), 'experiment_runs', ['signature'], unique=False)
    op.create_index(op.f('ix_experiment_runs_created_at'), 'experiment_runs', ['created_at'], unique=False)
    op.create_table('measurement_samples',
    sa.Column('id', sa.Integer(), nullable=False),
    sa.Column('run_id', sa.Integer(), nullable=False),
    sa.Column('kind', sa.String(length=20), nullable=False),
    sa.Column('sample_id', sa.Integer(), nullable=False),
    sa.Column('key_a', sa.String(length=64), nullable=True),
    sa.Column('key_b', sa.String(length=64), nullable=True),
    sa.Column('value', sa.Float(), nullable=True),
    sa.Column('created_at', sa.DateTime(), nullable=True),
    sa.ForeignKeyConstraint(['run_id'], ['experiment_runs.id']),
    sa.PrimaryKeyConstraint('id')
    )
    op.create_index(op.f('ix_measurement_samples_id'), 'measurement_samples', ['id'], unique=False)
    op.create_index(op.f('ix_measurement_samples_run_id'), 'measurement_samples', ['run_id'], unique=False)
    op.create_index(op.f('ix_measurement_samples_kind'), 'measurement_samples', ['kind'], unique=False)


def downgrade() -> None:
    op.drop_index(op.f('ix_measurement_samples_kind'), table_name='measurement_samples')
    op.drop_index(op.f('ix_measurement_samples_run_id'), table_name='measurement_samples')
    op.drop_index(op.f('ix_measurement_samples_id'), table_name='measurement_samples')
    op.drop_table('measurement_samples')
    op.drop_index(op.f('ix_experiment_runs_created_at'), table_name='experiment_runs')
    op.drop_index(op.f('ix_experiment_runs_signature'), table_name='experiment_runs')
    op.drop_index(op.f('ix_experiment_runs_command'), table_name='experiment_runs')
    op.drop_index(op.f('ix_experiment_runs_id'), table_name='experiment_runs')
    op.drop_table('experiment_runs')
